/**
 * @file io.hpp
 * @brief JSON and CSV formats for every file the tools read or write:
 *        series dumps, bundle tuples, germ systems, cochain problems,
 *        scan reports. Angles serialize as numbers, or as "p/q" strings in
 *        exact mode. All floating output uses %.17g for byte-stable
 *        round-trips.
 */
#ifndef UEDA_IO_HPP
#define UEDA_IO_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "ueda/bundles.hpp"
#include "ueda/cohomology.hpp"
#include "ueda/germ.hpp"
#include "ueda/series.hpp"

namespace ueda {

using json = nlohmann::ordered_json;

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline json cplx_to_json(const cplx& c) { return json::array({c.real(), c.imag()}); }

inline cplx cplx_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw invalid_input("expected [re, im] pair");
    return cplx(j[0].get<double>(), j[1].get<double>());
}

inline json angle_to_json(const Angle& a) {
    if (a.exact())
        return std::to_string(a.numerator()) + "/" + std::to_string(a.denominator());
    return a.value();
}

inline Angle angle_from_json(const json& j, bool exact_mode) {
    if (j.is_string()) return Angle::parse(j.get<std::string>());
    double v = j.get<double>();
    if (!exact_mode) return Angle::from_double(v);
    auto pq = rational_reconstruct(v, 1000000000LL, 1e-12);
    if (!pq)
        throw invalid_input("exact mode: angle " + fmt_double(v) +
                            " has no rational reconstruction; use a \"p/q\" string");
    return Angle::from_fraction(pq->first, pq->second);
}

// --- truncated series ------------------------------------------------------

inline json series_to_json(const TruncatedSeries<cplx>& s) {
    json out;
    out["r"] = s.r();
    out["N"] = s.N();
    out["components"] = s.m();
    json terms = json::array();
    // gather per index so each term carries the full coefficient vector
    std::map<MultiIndex, std::vector<cplx>> collected;
    s.for_each_term([&](const MultiIndex& a, int c, const cplx& v) {
        auto it = collected.find(a);
        if (it == collected.end())
            it = collected.emplace(a, std::vector<cplx>(static_cast<size_t>(s.m()))).first;
        it->second[static_cast<size_t>(c)] = v;
    });
    for (const auto& [alpha, vec] : collected) {
        json t;
        t["alpha"] = alpha.exponents();
        json cs = json::array();
        for (const auto& v : vec) cs.push_back(cplx_to_json(v));
        t["coeff"] = cs;
        terms.push_back(t);
    }
    out["terms"] = terms;
    return out;
}

inline TruncatedSeries<cplx> series_from_json(const json& j) {
    TruncatedSeries<cplx> s(j.at("r").get<int>(), j.at("N").get<int>(),
                            j.at("components").get<int>());
    for (const auto& t : j.at("terms")) {
        MultiIndex alpha(t.at("alpha").get<std::vector<int>>());
        const auto& cs = t.at("coeff");
        if (static_cast<int>(cs.size()) != s.m())
            throw invalid_input("series term: coefficient count mismatch");
        for (int c = 0; c < s.m(); ++c) {
            cplx v = cplx_from_json(cs[static_cast<size_t>(c)]);
            if (v != cplx(0.0, 0.0)) s.set_coeff(alpha, c, v);
        }
    }
    return s;
}

// --- bundle tuples ----------------------------------------------------------

inline json tuple_to_json(const FlatBundleTuple& t) {
    json out;
    out["genus"] = t.genus();
    json bundles = json::array();
    for (const auto& b : t.bundles) {
        json angles = json::array();
        for (const auto& a : b.angles) angles.push_back(angle_to_json(a));
        bundles.push_back(json{{"angles", angles}});
    }
    out["bundles"] = bundles;
    return out;
}

inline FlatBundleTuple tuple_from_json(const json& j, bool exact_mode) {
    FlatBundleTuple t;
    int genus = j.at("genus").get<int>();
    for (const auto& bj : j.at("bundles")) {
        FlatLineBundle b;
        b.genus = genus;
        for (const auto& aj : bj.at("angles")) b.angles.push_back(angle_from_json(aj, exact_mode));
        t.bundles.push_back(std::move(b));
    }
    t.validate();
    return t;
}

// --- germ systems -----------------------------------------------------------

namespace detail {

inline json fseries_terms_to_json(const FSeries& f) {
    json terms = json::array();
    std::map<MultiIndex, std::vector<FourierPoly>> collected;
    f.for_each_term([&](const MultiIndex& a, int c, const FourierPoly& v) {
        auto it = collected.find(a);
        if (it == collected.end())
            it = collected.emplace(a, std::vector<FourierPoly>(static_cast<size_t>(f.m()))).first;
        it->second[static_cast<size_t>(c)] = v;
    });
    for (const auto& [alpha, vec] : collected) {
        json t;
        t["alpha"] = alpha.exponents();
        bool constant = true;
        for (const auto& v : vec) constant &= v.is_constant();
        if (constant) {
            json cs = json::array();
            for (const auto& v : vec) cs.push_back(cplx_to_json(v.constant_part()));
            t["coeff"] = cs;
        } else {
            // collect the union of modes, one entry per mode
            std::set<std::array<int, 2>> modes;
            for (const auto& v : vec)
                for (const auto& [m, c] : v.terms()) modes.insert(m);
            json mj = json::array();
            for (const auto& m : modes) {
                json entry;
                entry["m"] = json::array({m[0], m[1]});
                json cs = json::array();
                for (const auto& v : vec) cs.push_back(cplx_to_json(v.coefficient(m)));
                entry["coeff"] = cs;
                mj.push_back(entry);
            }
            t["modes"] = mj;
        }
        terms.push_back(t);
    }
    return terms;
}

inline void fseries_terms_from_json(const json& terms, FSeries& f) {
    for (const auto& t : terms) {
        MultiIndex alpha(t.at("alpha").get<std::vector<int>>());
        if (t.contains("modes")) {
            for (const auto& entry : t.at("modes")) {
                std::array<int, 2> m{entry.at("m")[0].get<int>(), entry.at("m")[1].get<int>()};
                const auto& cs = entry.at("coeff");
                for (int c = 0; c < f.m(); ++c) {
                    cplx v = cplx_from_json(cs[static_cast<size_t>(c)]);
                    if (v != cplx(0.0, 0.0))
                        f.set_coeff(alpha, c,
                                    f.coeff(alpha, c) + FourierPoly::harmonic(m, v));
                }
            }
        } else {
            const auto& cs = t.at("coeff");
            for (int c = 0; c < f.m(); ++c) {
                cplx v = cplx_from_json(cs[static_cast<size_t>(c)]);
                if (v != cplx(0.0, 0.0)) f.set_coeff(alpha, c, FourierPoly(v));
            }
        }
    }
}

} // namespace detail

inline json germ_to_json(const GermSystem& sys) {
    json out;
    out["r"] = sys.r;
    out["N"] = sys.N;
    out["mode"] = sys.exact_mode ? "exact" : "float";
    json gens = json::array();
    for (const auto& g : sys.generators) {
        json gj;
        if (g.diagonal) {
            json angles = json::array();
            for (const auto& a : g.angles) angles.push_back(angle_to_json(a));
            gj["T"] = json{{"angles", angles}};
        } else {
            json rows = json::array();
            for (int i = 0; i < sys.r; ++i) {
                json row = json::array();
                for (int k = 0; k < sys.r; ++k) row.push_back(cplx_to_json(g.T(i, k)));
                rows.push_back(row);
            }
            gj["T"] = rows;
        }
        gj["c"] = json::array({angle_to_json(g.shift[0]), angle_to_json(g.shift[1])});
        gj["terms"] = detail::fseries_terms_to_json(g.f);
        if (g.base_terms) gj["base_terms"] = detail::fseries_terms_to_json(*g.base_terms);
        gens.push_back(gj);
    }
    out["generators"] = gens;
    return out;
}

inline GermSystem germ_from_json(const json& j) {
    GermSystem sys;
    sys.r = j.at("r").get<int>();
    sys.N = j.at("N").get<int>();
    sys.exact_mode = j.value("mode", "float") == std::string("exact");
    for (const auto& gj : j.at("generators")) {
        GermGenerator g;
        const auto& Tj = gj.at("T");
        if (Tj.is_object() && Tj.contains("angles")) {
            g.diagonal = true;
            for (const auto& aj : Tj.at("angles"))
                g.angles.push_back(angle_from_json(aj, sys.exact_mode));
        } else {
            g.diagonal = false;
            g.T = Eigen::MatrixXcd::Zero(sys.r, sys.r);
            for (int i = 0; i < sys.r; ++i)
                for (int k = 0; k < sys.r; ++k)
                    g.T(i, k) = cplx_from_json(Tj[static_cast<size_t>(i)][static_cast<size_t>(k)]);
        }
        if (gj.contains("c")) {
            const auto& cj = gj.at("c");
            for (size_t d = 0; d < 2 && d < cj.size(); ++d)
                g.shift[d] = angle_from_json(cj[d], sys.exact_mode);
        }
        g.f = FSeries(sys.r, sys.N, sys.r);
        if (gj.contains("terms")) detail::fseries_terms_from_json(gj.at("terms"), g.f);
        if (gj.contains("base_terms")) {
            FSeries bt(sys.r, sys.N, 2);
            detail::fseries_terms_from_json(gj.at("base_terms"), bt);
            g.base_terms = bt;
        }
        sys.generators.push_back(std::move(g));
    }
    sys.validate();
    return sys;
}

// --- cochain problems --------------------------------------------------------

inline TwistedCochainProblem problem_from_json(const json& j) {
    TwistedCochainProblem p;
    p.exact_mode = j.value("mode", "float") == std::string("exact");
    p.s = j.at("s").get<int>();
    std::string model = j.at("model").get<std::string>();
    if (model == "nerve") {
        p.model = TwistedCochainProblem::Model::Nerve;
        const auto& nj = j.at("nerve");
        p.nerve.vertex_count = nj.at("vertices").get<int>();
        for (const auto& e : nj.at("edges"))
            p.nerve.edges.push_back({e[0].get<int>(), e[1].get<int>()});
        if (nj.contains("triangles"))
            for (const auto& t : nj.at("triangles"))
                p.nerve.triangles.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
        for (const auto& wj : j.at("weights")) {
            Eigen::MatrixXcd W(p.s, p.s);
            for (int a = 0; a < p.s; ++a)
                for (int b = 0; b < p.s; ++b)
                    W(a, b) = cplx_from_json(wj[static_cast<size_t>(a)][static_cast<size_t>(b)]);
            p.edge_weights.push_back(W);
        }
        for (const auto& hj : j.at("rhs")) {
            Eigen::VectorXcd h(p.s);
            for (int a = 0; a < p.s; ++a) h(a) = cplx_from_json(hj[static_cast<size_t>(a)]);
            p.edge_rhs.push_back(h);
        }
    } else if (model == "group") {
        p.model = TwistedCochainProblem::Model::Group;
        if (j.contains("max_modes")) p.max_modes = j.at("max_modes").get<int>();
        for (const auto& gj : j.at("generators")) {
            GroupGenerator g;
            if (gj.contains("angles")) {
                g.diagonal = true;
                for (const auto& aj : gj.at("angles"))
                    g.angles.push_back(angle_from_json(aj, p.exact_mode));
            } else {
                g.diagonal = false;
                g.W = Eigen::MatrixXcd::Zero(p.s, p.s);
                const auto& Wj = gj.at("W");
                for (int a = 0; a < p.s; ++a)
                    for (int b = 0; b < p.s; ++b)
                        g.W(a, b) =
                            cplx_from_json(Wj[static_cast<size_t>(a)][static_cast<size_t>(b)]);
            }
            if (gj.contains("c")) {
                const auto& cj = gj.at("c");
                for (size_t d = 0; d < 2 && d < cj.size(); ++d)
                    g.shift[d] = angle_from_json(cj[d], p.exact_mode);
            }
            g.rhs.assign(static_cast<size_t>(p.s), FourierPoly());
            if (gj.contains("rhs"))
                for (const auto& entry : gj.at("rhs")) {
                    std::array<int, 2> m{0, 0};
                    if (entry.contains("m")) m = {entry.at("m")[0].get<int>(),
                                                  entry.at("m")[1].get<int>()};
                    const auto& cs = entry.at("coeff");
                    for (int c = 0; c < p.s; ++c) {
                        cplx v = cplx_from_json(cs[static_cast<size_t>(c)]);
                        if (v != cplx(0.0, 0.0))
                            g.rhs[static_cast<size_t>(c)] =
                                g.rhs[static_cast<size_t>(c)] + FourierPoly::harmonic(m, v);
                    }
                }
            p.generators.push_back(std::move(g));
        }
    } else {
        throw invalid_input("problem_from_json: unknown model '" + model + "'");
    }
    p.validate();
    return p;
}

// --- file helpers -------------------------------------------------------------

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open input file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw invalid_input("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input("cannot open output file: " + path);
    out << text;
}

} // namespace ueda

#endif // UEDA_IO_HPP
