// ncc: batch CLI over the nc convexity library. Every command reads JSON
// inputs, runs one operation, and emits a single JSON report (stdout or
// --out). Exit codes: 0 = computed verdict (Outside/Violated are answers,
// not errors), 2 = input error, 3 = numerical failure.

#include "ncc/io.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonOpts {
    std::string set_path, point_path, poly_path, mu_path, nu_path, out_path;
    std::uint64_t seed = 0;
    int relaxation_level = 3;
    int max_steps = 8;
    ncc::Tolerances tol;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--seed", o.seed, "random seed (default 0)");
    cmd->add_option("--tol-psd", o.tol.eps_psd, "minimum-eigenvalue slack");
    cmd->add_option("--tol-rank", o.tol.eps_rank, "relative rank cutoff");
    cmd->add_option("--tol-eq", o.tol.eps_eq, "entrywise equality tolerance");
    cmd->add_option("--tol-sdp", o.tol.eps_sdp, "solver duality gap");
    cmd->add_option("--relaxation-level", o.relaxation_level, "moment relaxation degree");
    cmd->add_option("--max-steps", o.max_steps, "dilation step budget");
    cmd->add_option("--out", o.out_path, "write the report to this file instead of stdout");
}

ncc::Json tolerances_json(const ncc::Tolerances& t) {
    return ncc::Json{{"eps_psd", t.eps_psd},
                     {"eps_rank", t.eps_rank},
                     {"eps_eq", t.eps_eq},
                     {"eps_sdp", t.eps_sdp},
                     {"eps_sym", t.eps_sym}};
}

void emit(const CommonOpts& o, const std::string& command, ncc::Json result, double wall_ms) {
    ncc::Json report{{"tool", "ncc"},
                     {"version", kVersion},
                     {"command", command},
                     {"seed", o.seed},
                     {"tolerances", tolerances_json(o.tol)},
                     {"result", std::move(result)},
                     {"wall_time_ms", wall_ms}};
    if (o.out_path.empty())
        std::cout << report.dump(2) << '\n';
    else
        ncc::write_json_file(o.out_path, report);
}

ncc::Json classify_flags(const ncc::ClassifyReport& c) {
    return ncc::Json{{"irreducible", c.irreducible},
                     {"maximal", c.maximal},
                     {"nc_extreme", c.nc_extreme}};
}

ncc::Json run_demo_interval(const CommonOpts& o) {
    ncc::NcSet k = ncc::interval_set(-1, 1);
    ncc::Json endpoints;
    for (double v : {-1.0, 1.0}) {
        ncc::ClassifyReport c =
            ncc::classify_point(k, ncc::NcPoint::scalar({ncc::Complex(v, 0)}), o.tol);
        endpoints[v < 0 ? "minus_one" : "plus_one"] = ncc::to_json(c);
    }
    ncc::NcPoint zero = ncc::NcPoint::scalar({ncc::Complex(0, 0)});
    std::vector<ncc::NcPoint> cands{ncc::NcPoint::scalar({ncc::Complex(-1, 0)}),
                                    ncc::NcPoint::scalar({ncc::Complex(1, 0)})};
    ncc::Json km = ncc::to_json(ncc::krein_milman_check(k, zero, cands, o.tol));
    ncc::FreePoly x = ncc::FreePoly::letter(1, 0);
    ncc::FreePoly x3 = ncc::multiply(ncc::multiply(x, x), x);
    ncc::Json env = ncc::to_json(
        ncc::convex_envelope(k, x3, zero, o.relaxation_level, o.max_steps, o.seed + 1, o.tol));
    return ncc::Json{{"set", ncc::to_json(k)},
                     {"endpoints", std::move(endpoints)},
                     {"midpoint_from_endpoints", std::move(km)},
                     {"envelope_cube_at_zero", std::move(env)}};
}

ncc::Json run_demo_cuntz(const CommonOpts& o) {
    ncc::NcSet ball = ncc::row_ball_set(2);
    const double r = 1.0 / std::sqrt(2.0);
    ncc::NcPoint edge = ncc::NcPoint::scalar({ncc::Complex(r, 0), ncc::Complex(r, 0)});
    ncc::ClassifyReport cls = ncc::classify_point(ball, edge, o.tol);
    ncc::DilateResult dil = ncc::dilate_to_maximal(ball, edge, std::min(o.max_steps, 4), o.tol);
    ncc::NcSet trunc = ncc::cuntz_opsys(2, 2, o.tol);
    ncc::NcPoint mild = ncc::NcPoint::scalar({ncc::Complex(0.4, 0), ncc::Complex(0.4, 0)});
    return ncc::Json{
        {"row_ball_coisometry",
         ncc::Json{{"classify", ncc::to_json(cls)}, {"dilation", ncc::to_json(dil)}}},
        {"truncated_system",
         ncc::Json{{"mild_point_membership", ncc::to_json(ncc::membership(trunc, mild, o.tol))},
                   {"coisometry_membership",
                    ncc::to_json(ncc::membership(trunc, edge, o.tol))}}}};
}

ncc::Json run_demo_semicircular(const CommonOpts&) {
    ncc::Json runs = ncc::Json::array();
    const double h = std::sqrt(3.0) / 2.0;
    for (ncc::Complex lambda : {ncc::Complex(1, 0), ncc::Complex(-1, 0), ncc::Complex(0, 1),
                                ncc::Complex(0.5, h)})
        runs.push_back(ncc::to_json(ncc::semicircular_defect(lambda, 8)));
    return ncc::Json{{"word_cap", 8}, {"runs", std::move(runs)}};
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("NCC_THREADS")) {
        const int n = std::atoi(threads);
        if (n > 0) Eigen::setNbThreads(n);
    }

    CLI::App app{"noncommutative convexity toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    CommonOpts o;
    std::string demo_name;
    std::string candidates_path;
    int samples = 50;
    int max_level = 3;

    auto* c_member = app.add_subcommand("membership", "test whether a point is in a set");
    c_member->add_option("--set", o.set_path, "set JSON")->required();
    c_member->add_option("--point", o.point_path, "point JSON")->required();
    add_common(c_member, o);

    auto* c_sep = app.add_subcommand("separate", "separating functional for an outside point");
    c_sep->add_option("--set", o.set_path, "set JSON")->required();
    c_sep->add_option("--point", o.point_path, "point JSON")->required();
    add_common(c_sep, o);

    auto* c_cls = app.add_subcommand("classify", "extremality / maximality report");
    c_cls->add_option("--set", o.set_path, "set JSON")->required();
    c_cls->add_option("--point", o.point_path, "point JSON")->required();
    add_common(c_cls, o);

    auto* c_dil = app.add_subcommand("dilate", "iterate dilations toward a maximal point");
    c_dil->add_option("--set", o.set_path, "set JSON")->required();
    c_dil->add_option("--point", o.point_path, "point JSON")->required();
    add_common(c_dil, o);

    auto* c_env = app.add_subcommand("envelope", "convex envelope bounds at a point");
    c_env->add_option("--set", o.set_path, "set JSON")->required();
    c_env->add_option("--poly", o.poly_path, "polynomial JSON")->required();
    c_env->add_option("--point", o.point_path, "point JSON")->required();
    add_common(c_env, o);

    auto* c_ord = app.add_subcommand("order", "Choquet and dilation order checks");
    c_ord->add_option("--set", o.set_path, "set JSON")->required();
    c_ord->add_option("--mu", o.mu_path, "first ucp map JSON")->required();
    c_ord->add_option("--nu", o.nu_path, "second ucp map JSON")->required();
    add_common(c_ord, o);

    auto* c_dec = app.add_subcommand("decompose", "extreme-point measure for a ucp map");
    c_dec->add_option("--set", o.set_path, "set JSON")->required();
    c_dec->add_option("--mu", o.mu_path, "ucp map JSON")->required();
    add_common(c_dec, o);

    auto* c_hull = app.add_subcommand("hull-check",
                                      "represent a point from extreme-point candidates");
    c_hull->add_option("--set", o.set_path, "set JSON")->required();
    c_hull->add_option("--point", o.point_path, "point JSON")->required();
    c_hull->add_option("--candidates", candidates_path,
                       "JSON array of candidate points (defaults to hull generators)");
    add_common(c_hull, o);

    auto* c_cvx = app.add_subcommand("convexity", "randomized midpoint convexity test");
    c_cvx->add_option("--set", o.set_path, "set JSON")->required();
    c_cvx->add_option("--poly", o.poly_path, "polynomial JSON")->required();
    c_cvx->add_option("--max-level", max_level, "highest matrix level probed");
    c_cvx->add_option("--samples", samples, "random midpoints per level");
    add_common(c_cvx, o);

    auto* c_demo = app.add_subcommand("demo", "worked examples");
    c_demo->add_option("name", demo_name, "interval | cuntz | semicircular")->required();
    add_common(c_demo, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto t0 = std::chrono::steady_clock::now();
    auto wall_ms = [&] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    };

    try {
        o.tol.validate();
        ncc::Json result;
        std::string command;
        if (*c_member) {
            command = "membership";
            ncc::NcSet k = ncc::set_from_json(ncc::read_json_file(o.set_path), o.tol);
            ncc::NcPoint x = ncc::point_from_json(ncc::read_json_file(o.point_path));
            result = ncc::to_json(ncc::membership(k, x, o.tol));
        } else if (*c_sep) {
            command = "separate";
            ncc::NcSet k = ncc::set_from_json(ncc::read_json_file(o.set_path), o.tol);
            ncc::NcPoint x = ncc::point_from_json(ncc::read_json_file(o.point_path));
            ncc::SeparationCertificate cert = ncc::separate(k, x, o.tol);
            result = ncc::Json{{"certificate", ncc::to_json(cert)},
                               {"verified", ncc::verify_certificate(k, x, cert, 2, o.tol)}};
        } else if (*c_cls) {
            command = "classify";
            ncc::NcSet k = ncc::set_from_json(ncc::read_json_file(o.set_path), o.tol);
            ncc::NcPoint x = ncc::point_from_json(ncc::read_json_file(o.point_path));
            result = ncc::to_json(ncc::classify_point(k, x, o.tol));
        } else if (*c_dil) {
            command = "dilate";
            ncc::NcSet k = ncc::set_from_json(ncc::read_json_file(o.set_path), o.tol);
            ncc::NcPoint x = ncc::point_from_json(ncc::read_json_file(o.point_path));
            result = ncc::to_json(ncc::dilate_to_maximal(k, x, o.max_steps, o.tol));
        } else if (*c_env) {
            command = "envelope";
            ncc::NcSet k = ncc::set_from_json(ncc::read_json_file(o.set_path), o.tol);
            ncc::FreePoly f = ncc::poly_from_json(ncc::read_json_file(o.poly_path));
            ncc::NcPoint x = ncc::point_from_json(ncc::read_json_file(o.point_path));
            result = ncc::to_json(
                ncc::convex_envelope(k, f, x, o.relaxation_level, o.max_steps, o.seed + 1, o.tol));
        } else if (*c_ord) {
            command = "order";
            ncc::NcSet k = ncc::set_from_json(ncc::read_json_file(o.set_path), o.tol);
            ncc::UcpRep mu = ncc::ucp_from_json(ncc::read_json_file(o.mu_path));
            ncc::UcpRep nu = ncc::ucp_from_json(ncc::read_json_file(o.nu_path));
            result = ncc::Json{
                {"choquet", ncc::to_json(ncc::choquet_order_check(k, mu, nu, {}, o.seed + 1,
                                                                  o.tol))},
                {"dilation",
                 ncc::to_json(ncc::dilation_order_check(k, mu, nu, o.relaxation_level, o.tol))}};
        } else if (*c_dec) {
            command = "decompose";
            ncc::NcSet k = ncc::set_from_json(ncc::read_json_file(o.set_path), o.tol);
            ncc::UcpRep mu = ncc::ucp_from_json(ncc::read_json_file(o.mu_path));
            ncc::DecompositionReport rep = ncc::represent_on_extreme(k, mu, o.max_steps, o.tol);
            std::vector<ncc::Json> flags;
            for (const ncc::NcMeasureAtom& a : rep.measure.atoms)
                flags.push_back(classify_flags(ncc::classify_point(k, a.point, o.tol)));
            result = ncc::to_json(rep, flags);
        } else if (*c_hull) {
            command = "hull-check";
            ncc::NcSet k = ncc::set_from_json(ncc::read_json_file(o.set_path), o.tol);
            ncc::NcPoint x = ncc::point_from_json(ncc::read_json_file(o.point_path));
            std::vector<ncc::NcPoint> cands;
            if (!candidates_path.empty()) {
                for (const ncc::Json& p : ncc::read_json_file(candidates_path))
                    cands.push_back(ncc::point_from_json(p));
            } else if (const ncc::HullPresentation* h = k.hull()) {
                cands = h->generators;
            } else {
                throw std::invalid_argument(
                    "hull-check: --candidates is required unless the set is a hull");
            }
            result = ncc::to_json(ncc::krein_milman_check(k, x, cands, o.tol));
        } else if (*c_cvx) {
            command = "convexity";
            ncc::NcSet k = ncc::set_from_json(ncc::read_json_file(o.set_path), o.tol);
            ncc::FreePoly f = ncc::poly_from_json(ncc::read_json_file(o.poly_path));
            result =
                ncc::to_json(ncc::test_nc_convexity(f, k, max_level, samples, o.seed + 1, o.tol));
        } else if (*c_demo) {
            command = "demo";
            if (demo_name == "interval")
                result = run_demo_interval(o);
            else if (demo_name == "cuntz")
                result = run_demo_cuntz(o);
            else if (demo_name == "semicircular")
                result = run_demo_semicircular(o);
            else
                throw std::invalid_argument("demo: unknown name '" + demo_name + "'");
            result = ncc::Json{{"name", demo_name}, {"report", std::move(result)}};
        }
        emit(o, command, std::move(result), wall_ms());
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << ncc::Json{{"error", e.what()}}.dump() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << ncc::Json{{"error", e.what()}}.dump() << '\n';
        return 3;
    }
}
