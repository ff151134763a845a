/**
 * @file cli.hpp
 * @brief Batch front-end: classify / majorant / normalize / example / scan
 *        runs from JSON inputs to CSV/JSON reports, with scripting-friendly
 *        exit codes. Exit 0: completed; exit 2: mathematical negative
 *        (finite type, Diophantine violation, torsion) with the report
 *        still written; exit 1: input or usage error.
 *
 * Reports embed the tool version and a hash of the effective configuration;
 * fixed seeds and the ordered parallel reductions make identical configs
 * produce byte-identical files at any thread count.
 */
#ifndef UEDA_CLI_HPP
#define UEDA_CLI_HPP

#include <iostream>
#include <sstream>
#include <string>

#include "ueda/io.hpp"
#include "ueda/majorant.hpp"
#include "ueda/normalizer.hpp"
#include "ueda/parallel.hpp"

namespace ueda {

struct RunConfig {
    std::string subcommand;
    std::string input_path;
    std::string out_path = "report.json";
    std::string mode = "float";  // exact | float
    int N = 8;
    bool N_given = false;
    int scan_bound = 50;
    unsigned seed = 1;
    int threads = 1;
    std::string example_name;

    void validate() const {
        if (N < 2) throw invalid_input("RunConfig: truncation degree must be >= 2");
        if (scan_bound < 1) throw invalid_input("RunConfig: scan bound must be >= 1");
        if (threads < 1) throw invalid_input("RunConfig: thread count must be >= 1");
        if (mode != "exact" && mode != "float")
            throw invalid_input("RunConfig: mode must be 'exact' or 'float'");
    }

    std::string canonical() const {
        std::ostringstream os;
        os << subcommand << '|' << input_path << '|' << out_path << '|' << mode << '|' << N << '|'
           << scan_bound << '|' << seed << '|' << threads << '|' << example_name;
        return os.str();
    }
    std::string config_hash() const { return hex64(fnv1a64(canonical())); }
};

namespace cli_detail {

inline std::string csv_path_for(const std::string& out) {
    auto dot = out.rfind('.');
    if (dot != std::string::npos && out.substr(dot) == ".json")
        return out.substr(0, dot) + ".csv";
    return out + ".csv";
}

inline std::string csv_header(const RunConfig& cfg) {
    std::ostringstream os;
    os << "# version=" << kVersion << "\n# config_hash=" << cfg.config_hash()
       << "\n# seed=" << cfg.seed << "\n";
    return os.str();
}

inline std::string alpha_compact(const MultiIndex& a) {
    std::string s;
    for (int i = 0; i < a.size(); ++i) {
        if (i) s += ';';
        s += std::to_string(a[i]);
    }
    return s;
}

inline void stamp(json& rep, const RunConfig& cfg) {
    rep["version"] = kVersion;
    rep["config_hash"] = cfg.config_hash();
}

inline int run_classify(const RunConfig& cfg) {
    json input = load_json_file(cfg.input_path);
    bool exact = cfg.mode == "exact";
    FlatBundleTuple tuple = tuple_from_json(input, exact);
    long long den_bound = input.value("torsion_denominator_bound", 1000000LL);
    double K = input.value("K", 1.0);

    ClassifyReport rep = classify(tuple, cfg.scan_bound, den_bound, exact, cfg.threads);

    json out;
    stamp(out, cfg);
    out["verdict"] = rep.verdict_string();
    int exit_code = 0;
    std::ostringstream csv;
    csv << csv_header(cfg) << "n,alpha,distance,bound,pass\n";
    if (rep.verdict == ClassVerdict::E0) {
        out["torsion_order"] = rep.torsion_order;
        out["denominators"] = rep.denominators;
        exit_code = 2;
    } else if (rep.verdict == ClassVerdict::Violation) {
        out["violating_alpha"] = rep.violating_alpha.exponents();
        exit_code = 2;
    } else {
        out["A"] = rep.fitted_A;
        out["tightest_witness"] = rep.tightest_witness.exponents();
        out["tightest_distance"] = rep.tightest_distance;
        for (const auto& row : rep.rows)
            csv << row.n << ',' << alpha_compact(row.alpha) << ',' << fmt_double(row.distance)
                << ',' << fmt_double(row.bound) << ',' << (row.pass ? 1 : 0) << '\n';
    }

    int n_max = std::min(cfg.scan_bound, 30);
    EpsilonSequence eps = epsilon_sequence(tuple, K, n_max, cfg.threads);
    SiegelReport sg = siegel_check(eps, n_max);
    json sj;
    sj["property_a"] = sg.property_a_pass;
    if (sg.property_a_pass)
        sj["A_grid"] = sg.A;
    else
        sj["a_witness_n"] = sg.a_witness;
    sj["property_b"] = sg.property_b_pass;
    sj["b_violations"] = sg.b_violations.size();
    out["siegel"] = sj;
    json ej = json::array();
    for (double v : eps.eps_inv) ej.push_back(v);
    out["eps_inv"] = ej;

    write_text_file(cli_detail::csv_path_for(cfg.out_path), csv.str());
    write_text_file(cfg.out_path, out.dump(2) + "\n");
    return exit_code;
}

inline int run_majorant(const RunConfig& cfg) {
    json input = load_json_file(cfg.input_path);
    MajorantParams p;
    p.K = input.value("K", 1.0);
    p.M = input.value("M", 1.0);
    p.R = input.value("R", 1.0);
    p.r = input.value("r", 1);
    int N = cfg.N;
    bool weighted = false;
    if (input.contains("eps_inv")) {
        EpsilonSequence eps;
        eps.K = p.K;
        for (const auto& v : input.at("eps_inv")) eps.eps_inv.push_back(v.get<double>());
        p.eps = eps;
        weighted = true;
    } else if (input.contains("eps_tuple")) {
        FlatBundleTuple t = tuple_from_json(input.at("eps_tuple"), cfg.mode == "exact");
        p.eps = epsilon_sequence(t, p.K, N, cfg.threads);
        weighted = true;
    }

    json out;
    stamp(out, cfg);
    out["K"] = p.K;
    out["M"] = p.M;
    out["R"] = p.R;
    out["r"] = p.r;
    out["N"] = N;
    out["weighted"] = weighted;
    int exit_code = 0;
    try {
        MajorantSeries A = weighted ? weighted_majorant_series(p, N) : majorant_series(p, N);
        DiagonalBounds db = diagonal_bounds(A, DiagonalVariant::Hat);
        if (!weighted) {
            ImplicitCrossCheck icc = implicit_cross_check(p, N);
            out["cross_check_max_rel_dev"] = icc.max_rel_deviation;
            out["cross_check_linear_coeff"] = icc.linear_coeff_at_0;
        }
        out["log_space"] = A.log_space;
        json terms = json::array();
        A.coeffs.for_each_term([&](const MultiIndex& a, int, const double& v) {
            terms.push_back(json{{"alpha", a.exponents()}, {"value", v}});
        });
        out["A"] = terms;
        json bj = json::array(), hj = json::array();
        for (double v : db.B) bj.push_back(v);
        for (double v : db.B_hat) hj.push_back(v);
        out["B"] = bj;
        out["B_hat"] = hj;
        out["radius_estimate"] = db.radius_estimate;
        out["radius_note"] =
            "tail-ratio estimate over the last ceil(N/3) shells; an estimate, not a certificate";

        std::ostringstream csv;
        csv << csv_header(cfg) << "n,B_n,B_hat_n,ratio\n";
        for (size_t i = 0; i < db.B.size(); ++i) {
            double ratio = i > 0 && db.B_hat[i - 1] != 0.0 ? db.B_hat[i] / db.B_hat[i - 1] : 0.0;
            csv << (i + 2) << ',' << fmt_double(db.B[i]) << ',' << fmt_double(db.B_hat[i]) << ','
                << fmt_double(ratio) << '\n';
        }
        write_text_file(cli_detail::csv_path_for(cfg.out_path), csv.str());
    } catch (const torsion_divisor_error& e) {
        out["error"] = e.what();
        out["torsion_index"] = e.index;
        exit_code = 2;
    }
    write_text_file(cfg.out_path, out.dump(2) + "\n");
    return exit_code;
}

inline json normalize_report(const NormalizeResult& nr) {
    json out;
    out["type"] = nr.type_string();
    out["finite_type"] = nr.finite_type;
    out["type_level"] = nr.type_level;
    json log = json::array();
    for (const auto& d : nr.state.divisor_log)
        log.push_back(json{{"degree", d.degree},
                           {"smallest_divisor", d.smallest_divisor},
                           {"resonant_count", d.resonant_count},
                           {"rhs_norm", d.rhs_norm},
                           {"solution_norm", d.solution_norm}});
    out["divisor_log"] = log;
    if (!nr.finite_type) {
        out["conjugacy_residual"] = nr.conjugacy_residual;
        out["residual_ok"] = nr.residual_ok;
        out["hypersurface_ok"] = nr.hypersurface_ok;
    }
    out["commutator_violation"] = nr.commutator_log;
    if (nr.obstruction) {
        json ob;
        ob["level"] = nr.obstruction->level;
        ob["class_norm"] = nr.obstruction->class_norm;
        ob["cocycle_violation"] = nr.obstruction->cocycle_violation;
        json comps = json::array();
        for (const auto& c : nr.obstruction->class_components)
            comps.push_back(json{{"generator", c.generator},
                                 {"lambda", c.lambda + 1},
                                 {"alpha", c.alpha.exponents()},
                                 {"mode", json::array({c.mode[0], c.mode[1]})},
                                 {"value", cplx_to_json(c.value)}});
        ob["components"] = comps;
        out["obstruction"] = ob;
    }
    if (!nr.bound_report.empty()) {
        json rows = json::array();
        for (const auto& r : nr.bound_report)
            rows.push_back(json{{"degree", r.degree},
                                {"majorant_min", r.majorant},
                                {"solution_max", r.solution_norm},
                                {"min_margin", r.min_margin},
                                {"ok", r.ok}});
        out["bound_margins"] = rows;
    }
    return out;
}

inline int run_normalize_like(const RunConfig& cfg, GermSystem sys, const json& options_json) {
    if (cfg.N_given) sys.N = std::max(cfg.N, sys.N);
    NormalizeOptions opt;
    opt.hypersurface = options_json.value("hypersurface", false);
    if (options_json.contains("track_majorant")) {
        MajorantParams mp;
        const auto& mj = options_json.at("track_majorant");
        mp.K = mj.value("K", 1.0);
        mp.M = mj.value("M", 1.0);
        mp.R = mj.value("R", 1.0);
        mp.r = sys.r;
        opt.track_majorant = mp;
    }
    NormalizeResult nr = normalize(sys, opt);
    json out = normalize_report(nr);
    stamp(out, cfg);
    write_text_file(cfg.out_path, out.dump(2) + "\n");
    return nr.finite_type ? 2 : 0;
}

inline int run_normalize(const RunConfig& cfg) {
    json input = load_json_file(cfg.input_path);
    GermSystem sys = germ_from_json(input);
    if (cfg.mode == "exact" && !sys.exact_mode)
        throw invalid_input("normalize: --mode exact but the germ file is float");
    return run_normalize_like(cfg, sys, input.value("options", json::object()));
}

inline int run_example(const RunConfig& cfg) {
    ExampleParams p;
    p.N = cfg.N;
    p.seed = cfg.seed;
    json extra = json::object();
    if (!cfg.input_path.empty()) extra = load_json_file(cfg.input_path);
    p.r = extra.value("r", 2);
    if (extra.contains("angles"))
        for (const auto& aj : extra.at("angles"))
            p.angles.push_back(angle_from_json(aj, cfg.mode == "exact"));
    if (extra.contains("extension"))
        for (const auto& ej : extra.at("extension")) p.extension.push_back(cplx_from_json(ej));
    GermSystem sys = generate_example(cfg.example_name, p);
    return run_normalize_like(cfg, sys, extra.value("options", json::object()));
}

inline int run_scan(const RunConfig& cfg) {
    json input = load_json_file(cfg.input_path);
    std::string task = input.at("task").get<std::string>();
    std::ostringstream csv;
    csv << csv_header(cfg);
    if (task == "majorant") {
        std::vector<double> Ks, Ms, Rs;
        std::vector<int> rs;
        for (const auto& v : input.at("K")) Ks.push_back(v.get<double>());
        for (const auto& v : input.at("M")) Ms.push_back(v.get<double>());
        for (const auto& v : input.at("R")) Rs.push_back(v.get<double>());
        for (const auto& v : input.at("r")) rs.push_back(v.get<int>());
        int N = input.value("N", cfg.N);
        struct Point { double K, M, R; int r; };
        std::vector<Point> grid;
        for (double K : Ks)
            for (double M : Ms)
                for (double R : Rs)
                    for (int r : rs) grid.push_back({K, M, R, r});
        auto rows = parallel_map<std::string>(grid.size(), cfg.threads, [&](size_t i) {
            const Point& pt = grid[i];
            MajorantParams mp;
            mp.K = pt.K;
            mp.M = pt.M;
            mp.R = pt.R;
            mp.r = pt.r;
            MajorantSeries A = majorant_series(mp, N);
            DiagonalBounds db = diagonal_bounds(A, DiagonalVariant::Hat);
            std::ostringstream os;
            os << fmt_double(pt.K) << ',' << fmt_double(pt.M) << ',' << fmt_double(pt.R) << ','
               << pt.r << ',' << N << ',' << fmt_double(db.B.back()) << ','
               << fmt_double(db.B_hat.back()) << ',' << fmt_double(db.radius_estimate) << '\n';
            return os.str();
        });
        csv << "K,M,R,r,N,B_N,B_hat_N,radius_estimate\n";
        for (const auto& row : rows) csv << row;
    } else if (task == "classify") {
        bool exact = cfg.mode == "exact";
        std::vector<FlatBundleTuple> tuples;
        for (const auto& tj : input.at("tuples")) tuples.push_back(tuple_from_json(tj, exact));
        int bound = input.value("scan_bound", cfg.scan_bound);
        long long den_bound = input.value("torsion_denominator_bound", 1000000LL);
        auto rows = parallel_map<std::string>(tuples.size(), cfg.threads, [&](size_t i) {
            ClassifyReport r = classify(tuples[i], bound, den_bound, exact, 1);
            std::ostringstream os;
            os << i << ',' << r.verdict_string() << ',' << fmt_double(r.fitted_A) << ','
               << alpha_compact(r.verdict == ClassVerdict::Violation ? r.violating_alpha
                                                                     : r.tightest_witness)
               << '\n';
            return os.str();
        });
        csv << "index,verdict,A,witness\n";
        for (const auto& row : rows) csv << row;
    } else {
        throw invalid_input("scan: unknown task '" + task + "'");
    }
    write_text_file(cfg.out_path, csv.str());
    return 0;
}

} // namespace cli_detail

/// Dispatch a run; returns the process exit code.
inline int run(const RunConfig& cfg) {
    try {
        cfg.validate();
        if (cfg.subcommand == "classify") return cli_detail::run_classify(cfg);
        if (cfg.subcommand == "majorant") return cli_detail::run_majorant(cfg);
        if (cfg.subcommand == "normalize") return cli_detail::run_normalize(cfg);
        if (cfg.subcommand == "example") return cli_detail::run_example(cfg);
        if (cfg.subcommand == "scan") return cli_detail::run_scan(cfg);
        throw invalid_input("unknown subcommand '" + cfg.subcommand + "'");
    } catch (const invalid_input& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace ueda

#endif // UEDA_CLI_HPP
