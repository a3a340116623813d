#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "iqp/cheat.hpp"
#include "iqp/codes.hpp"
#include "iqp/errors.hpp"
#include "iqp/gf2.hpp"
#include "iqp/protocol.hpp"
#include "iqp/reductions.hpp"
#include "iqp/rng.hpp"
#include "iqp/simulator.hpp"
#include "iqp/xprogram.hpp"

namespace iqp {

// Exit codes: 0 success/Accept, 1 Reject, 2 Inconclusive, 3 usage error,
// 4 infeasible size.
enum ExitCode : int {
    kExitOk = 0,
    kExitReject = 1,
    kExitInconclusive = 2,
    kExitUsage = 3,
    kExitInfeasible = 4,
};

namespace detail {

inline std::uint64_t parse_seed(const std::string& text) {
    try {
        return std::stoull(text, nullptr, 0);  // decimal or 0x-prefixed hex
    } catch (const std::exception&) {
        throw std::invalid_argument("bad seed '" + text + "'");
    }
}

inline std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10f", v);
    return buf;
}

template <typename T>
inline T read_file(const std::string& path, T (*reader)(std::istream&)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::invalid_argument("cannot open " + path);
    }
    return reader(in);
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::invalid_argument("cannot write " + path);
    }
    return out;
}

}  // namespace detail

/// The whole command surface; returns a process exit code. `out` carries one
/// machine-readable key=value record per run, diagnostics go to `err`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"IQP X-program simulator and challenge protocol harness"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "worker count cap (processing is sequential)")
        ->check(CLI::PositiveNumber);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a challenge/secret pair");
    std::uint64_t gen_q = 0;
    std::int64_t gen_obf = -1;
    std::string gen_seed = "0";
    std::string gen_out_challenge;
    std::string gen_out_secret;
    gen->add_option("--q", gen_q, "QR prime (q+1 divisible by 8)")->required();
    gen->add_option("--obf", gen_obf, "number of obfuscation rows (default q)");
    gen->add_option("--seed", gen_seed, "RNG seed")->required();
    gen->add_option("--out-challenge", gen_out_challenge, "challenge file")->required();
    gen->add_option("--out-secret", gen_out_secret, "secret file")->required();

    // prove / cheat
    auto* prove = app.add_subcommand("prove", "honest prover: sample the IQP distribution");
    auto* cheat = app.add_subcommand("cheat", "classical prover: second-derivative sampler");
    std::string pv_challenge;
    std::uint64_t pv_m = 0;
    std::string pv_seed = "0";
    std::string pv_out;
    unsigned pv_cap_n = SimLimits{}.fourier_max_qubits;
    unsigned pv_cap_k = SimLimits{}.pathsum_max_elements;
    for (CLI::App* sub : {prove, cheat}) {
        sub->add_option("--challenge", pv_challenge, "challenge file")->required();
        sub->add_option("--m", pv_m, "number of samples")->required();
        sub->add_option("--seed", pv_seed, "RNG seed")->required();
        sub->add_option("--out", pv_out, "transcript file")->required();
    }
    prove->add_option("--cap-n", pv_cap_n, "Fourier backend qubit cap");
    prove->add_option("--cap-k", pv_cap_k, "path-sum backend element cap");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "hypothesis test on a transcript");
    std::string vf_challenge;
    std::string vf_secret;
    std::string vf_transcript;
    double vf_delta = 1e-3;
    verify_cmd->add_option("--challenge", vf_challenge)->required();
    verify_cmd->add_option("--secret", vf_secret)->required();
    verify_cmd->add_option("--transcript", vf_transcript)->required();
    verify_cmd->add_option("--delta", vf_delta, "error probability bound (default 1e-3)");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "exact output distribution of a program");
    std::string sim_program;
    std::string sim_backend = "fourier";
    std::string sim_out;
    std::string sim_format = "csv";
    unsigned sim_cap_n = SimLimits{}.fourier_max_qubits;
    unsigned sim_cap_k = SimLimits{}.pathsum_max_elements;
    simulate->add_option("--program", sim_program)->required();
    simulate->add_option("--backend", sim_backend)->check(CLI::IsMember({"fourier", "pathsum"}));
    simulate->add_option("--out", sim_out)->required();
    simulate->add_option("--format", sim_format)->check(CLI::IsMember({"csv", "bin"}));
    simulate->add_option("--cap-n", sim_cap_n);
    simulate->add_option("--cap-k", sim_cap_k);

    // bias
    auto* bias_cmd = app.add_subcommand("bias", "exact directional bias via the code form");
    std::string bias_program;
    std::string bias_s;
    bias_cmd->add_option("--program", bias_program)->required();
    bias_cmd->add_option("--s", bias_s, "direction as a 0/1 string")->required();

    // entropy
    auto* entropy_cmd = app.add_subcommand("entropy", "collision entropy, both formulas");
    std::string ent_program;
    unsigned ent_cap_n = SimLimits{}.fourier_max_qubits;
    entropy_cmd->add_option("--program", ent_program)->required();
    entropy_cmd->add_option("--cap-n", ent_cap_n);

    // reduce
    auto* reduce_cmd = app.add_subcommand("reduce", "compile to a Z-network or Graph-program");
    std::string red_program;
    std::string red_target;
    std::string red_out;
    reduce_cmd->add_option("--program", red_program)->required();
    reduce_cmd->add_option("--target", red_target)->required()->check(CLI::IsMember({"znet", "graph"}));
    reduce_cmd->add_option("--out", red_out)->required();

    // experiment-entropy
    auto* exp_cmd = app.add_subcommand("experiment-entropy",
                                       "collision entropy of random programs (reporting only)");
    unsigned exp_n = 0;
    unsigned exp_k = 0;
    unsigned exp_trials = 0;
    std::string exp_seed = "0";
    exp_cmd->add_option("--n", exp_n)->required();
    exp_cmd->add_option("--k", exp_k)->required();
    exp_cmd->add_option("--trials", exp_trials)->required();
    exp_cmd->add_option("--seed", exp_seed, "RNG seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            std::uint64_t seed = detail::parse_seed(gen_seed);
            std::size_t n_obf = gen_obf < 0 ? gen_q : static_cast<std::size_t>(gen_obf);
            auto [challenge, secret] = build_challenge(gen_q, n_obf, seed);
            {
                std::ofstream f = detail::open_out(gen_out_challenge);
                write_challenge(f, challenge);
            }
            {
                std::ofstream f = detail::open_out(gen_out_secret);
                write_secret(f, secret);
            }
            out << "challenge_id=" << challenge.challenge_id << " q=" << challenge.q
                << " k=" << challenge.matrix.row_count() << " n=" << challenge.matrix.col_count()
                << " out_challenge=" << gen_out_challenge << " out_secret=" << gen_out_secret
                << "\n";
            return kExitOk;
        }
        if (prove->parsed() || cheat->parsed()) {
            Challenge ch = detail::read_file(pv_challenge, +[](std::istream& in) {
                return read_challenge(in);
            });
            Rng rng(detail::parse_seed(pv_seed));
            ProofTranscript transcript;
            if (prove->parsed()) {
                SimLimits limits;
                limits.fourier_max_qubits = pv_cap_n;
                limits.pathsum_max_elements = pv_cap_k;
                transcript = honest_prove(ch, pv_m, rng, limits);
            } else {
                transcript = cheat_prove(ch, pv_m, rng);
            }
            {
                std::ofstream f = detail::open_out(pv_out);
                write_transcript(f, transcript.samples);
            }
            out << "prover=" << (prove->parsed() ? "honest" : "cheat") << " samples=" << pv_m
                << " out=" << pv_out << "\n";
            return kExitOk;
        }
        if (verify_cmd->parsed()) {
            Challenge ch = detail::read_file(vf_challenge, +[](std::istream& in) {
                return read_challenge(in);
            });
            Secret sec = detail::read_file(vf_secret, +[](std::istream& in) {
                return read_secret(in);
            });
            SampleSet samples = detail::read_file(vf_transcript, +[](std::istream& in) {
                return read_transcript(in);
            });
            if (samples.samples.empty()) {
                samples.n = ch.matrix.col_count();
            }
            VerifyParams params = default_params(vf_delta);
            VerifyReport report = verify(ch, sec, {samples, ProverTag::external}, params);
            out << "decision=" << to_string(report.decision)
                << " bias_observed=" << detail::fmt(report.bias_observed)
                << " threshold=" << detail::fmt(report.threshold) << " m_raw=" << report.m_raw
                << " m_filtered=" << report.m_filtered << " m_min=" << report.m_min << "\n";
            switch (report.decision) {
                case Decision::accept:
                    return kExitOk;
                case Decision::reject:
                    return kExitReject;
                default:
                    return kExitInconclusive;
            }
        }
        if (simulate->parsed()) {
            ConstantActionProgram prog = detail::read_file(sim_program, +[](std::istream& in) {
                return parse_program(in);
            });
            SimLimits limits;
            limits.fourier_max_qubits = sim_cap_n;
            limits.pathsum_max_elements = sim_cap_k;
            OutputDistribution dist = sim_backend == "pathsum"
                                          ? distribution_pathsum(prog, limits)
                                          : distribution_fourier(prog, limits);
            {
                std::ofstream f = detail::open_out(sim_out);
                if (sim_format == "bin") {
                    write_distribution_bin(f, dist);
                } else {
                    write_distribution_csv(f, dist);
                }
            }
            out << "backend=" << sim_backend << " n=" << dist.qubits()
                << " outcomes=" << dist.size() << " format=" << sim_format << " out=" << sim_out
                << "\n";
            return kExitOk;
        }
        if (bias_cmd->parsed()) {
            ConstantActionProgram prog = detail::read_file(bias_program, +[](std::istream& in) {
                return parse_program(in);
            });
            BitVector s = BitVector::from_string(bias_s);
            double b = exact_bias(prog, s);
            out << "bias=" << detail::fmt(b) << " s=" << bias_s << "\n";
            return kExitOk;
        }
        if (entropy_cmd->parsed()) {
            ConstantActionProgram prog = detail::read_file(ent_program, +[](std::istream& in) {
                return parse_program(in);
            });
            SimLimits limits;
            limits.fourier_max_qubits = ent_cap_n;
            OutputDistribution dist = distribution_fourier(prog, limits);
            out << "s2=" << detail::fmt(collision_entropy(dist))
                << " s2_via_bias=" << detail::fmt(collision_entropy_via_bias(dist)) << "\n";
            return kExitOk;
        }
        if (reduce_cmd->parsed()) {
            ConstantActionProgram prog = detail::read_file(red_program, +[](std::istream& in) {
                return parse_program(in);
            });
            std::ofstream f = detail::open_out(red_out);
            if (red_target == "znet") {
                ZNetwork net = xprogram_to_znetwork(prog.to_xprogram());
                write_znetwork(f, net);
                out << "target=znet qubits=" << net.n << " gates=" << net.gates.size()
                    << " out=" << red_out << "\n";
            } else {
                auto [gp, pp] = xprogram_to_graphprogram(prog.to_xprogram());
                write_graphprogram(f, gp);
                out << "target=graph vertices=" << gp.vertex_count << " edges=" << gp.edges.size()
                    << " out=" << red_out << "\n";
            }
            return kExitOk;
        }
        if (exp_cmd->parsed()) {
            SimLimits limits;
            if (exp_n > limits.fourier_max_qubits) {
                throw InfeasibleError("experiment-entropy: n exceeds the Fourier cap");
            }
            Rng rng(detail::parse_seed(exp_seed));
            double sum = 0.0;
            double low = 0.0;
            double high = 0.0;
            for (unsigned t = 0; t < exp_trials; t++) {
                BitMatrix m(exp_k, exp_n);
                for (unsigned i = 0; i < exp_k; i++) {
                    for (unsigned j = 0; j < exp_n; j++) {
                        m.set(i, j, rng.next_u64() & 1);
                    }
                }
                double s2 = collision_entropy(distribution_fourier({m, Action(1, 8)}, limits));
                sum += s2;
                if (t == 0 || s2 < low) {
                    low = s2;
                }
                if (t == 0 || s2 > high) {
                    high = s2;
                }
            }
            double mean = exp_trials == 0 ? 0.0 : sum / exp_trials;
            out << "trials=" << exp_trials << " n=" << exp_n << " k=" << exp_k
                << " mean_s2=" << detail::fmt(mean) << " min_s2=" << detail::fmt(low)
                << " max_s2=" << detail::fmt(high)
                << " mean_gap=" << detail::fmt(static_cast<double>(exp_n) - mean) << "\n";
            return kExitOk;
        }
    } catch (const InfeasibleError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

inline int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; i++) {
        args.emplace_back(argv[i]);
    }
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace iqp
