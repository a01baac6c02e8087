#include "schroeder/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "schroeder/basin.hpp"
#include "schroeder/dynamics.hpp"
#include "schroeder/growth.hpp"
#include "schroeder/parallel.hpp"
#include "schroeder/render.hpp"
#include "schroeder/series.hpp"
#include "schroeder/tracts.hpp"
#include "schroeder/unhyp.hpp"

namespace schroeder {

namespace {

struct JobConfig {
    std::string map_file;
    std::string c_text;
    std::string z0_text;
    int period = 1;
    int order_n = kDefaultSeriesOrder;
    double box = 0.0; // 0: command default
    int grid = 0;     // 0: command default
    std::string out;
    unsigned threads = 1;
    std::vector<std::string> a_texts;
    std::vector<std::string> w_texts;
    double r = 0.05;
    int k_max = 10;
    double r_max = 1e6;
    std::string kind = "domain";
    int max_iterations = 1000;
    std::string range = "-2.5,1.5,-2,2";
    int degree = 2;
    bool cover = false;
    std::string csv;
    std::string heatmap;
    std::string pgm_dir;
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw PreconditionError("cannot parse number '" + item + "'");
        }
        if (item.find_first_not_of(" \t", used) != std::string::npos) {
            throw PreconditionError("cannot parse number '" + item + "'");
        }
        out.push_back(v);
    }
    return out;
}

Cplx parse_complex(const std::string& text) {
    const auto v = parse_list(text);
    if (v.size() != 2) {
        throw PreconditionError("expected RE,IM but got '" + text + "'");
    }
    return {v[0], v[1]};
}

RationalMap load_map(const JobConfig& cfg) {
    if (!cfg.map_file.empty() && !cfg.c_text.empty()) {
        throw PreconditionError("give either --map or --c, not both");
    }
    if (!cfg.map_file.empty()) {
        std::ifstream is(cfg.map_file);
        if (!is) {
            throw Error("cannot read map file " + cfg.map_file);
        }
        nlohmann::json j;
        try {
            is >> j;
        } catch (const nlohmann::json::exception& e) {
            throw PreconditionError("malformed map file: " + std::string(e.what()));
        }
        return RationalMap::from_json(j);
    }
    return RationalMap::quadratic(cfg.c_text.empty() ? Cplx{0.0, 0.0} : parse_complex(cfg.c_text));
}

// The periodic point near --z0, or the most repelling one of the period.
PeriodicPoint select_point(const RationalMap& f, const JobConfig& cfg) {
    if (!cfg.z0_text.empty()) {
        const PeriodicPoint pt = nearest_periodic_point(f, parse_sphere_point(cfg.z0_text), cfg.period);
        if (pt.kind != PeriodicClass::Repelling) {
            throw PreconditionError("periodic point " + to_string(pt.z) + " is not repelling (" +
                                    std::string(to_string(pt.kind)) + ")");
        }
        return pt;
    }
    std::optional<PeriodicPoint> best;
    for (const auto& pt : periodic_points(f, cfg.period)) {
        if (pt.z.is_infinity() || pt.kind != PeriodicClass::Repelling) {
            continue;
        }
        if (!best || std::abs(pt.multiplier) > std::abs(best->multiplier)) {
            best = pt;
        }
    }
    if (!best) {
        throw PreconditionError("no finite repelling point of period " + std::to_string(cfg.period));
    }
    return *best;
}

SchroederSeries load_series(const RationalMap& f, const JobConfig& cfg) {
    return build_schroeder_series(f, select_point(f, cfg), cfg.order_n);
}

void emit(const JobConfig& cfg, const std::string& text, std::ostream& out) {
    if (cfg.out.empty()) {
        out << text;
        return;
    }
    std::ofstream os(cfg.out, std::ios::binary);
    if (!os) {
        throw Error("cannot open " + cfg.out + " for writing");
    }
    os << text;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw Error("cannot open " + path + " for writing");
    }
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

nlohmann::ordered_json complex_json(Cplx z) { return {z.real(), z.imag()}; }

TractOptions tract_options(const JobConfig& cfg) {
    TractOptions t;
    if (cfg.box > 0.0) {
        t.half_width = cfg.box;
    }
    if (cfg.grid > 0) {
        t.grid = cfg.grid;
    }
    t.threads = cfg.threads;
    return t;
}

std::vector<SpherePoint> values_from(const JobConfig& cfg) {
    std::vector<SpherePoint> out;
    for (const auto& t : cfg.a_texts) {
        out.push_back(parse_sphere_point(t));
    }
    return out;
}

int cmd_coeffs(const JobConfig& cfg, std::ostream& out) {
    const RationalMap f = load_map(cfg);
    SchroederSeries s = schroeder_coefficients(f, select_point(f, cfg), cfg.order_n);
    // short truncations are reported without a trusted radius
    if (cfg.order_n >= 8) {
        s = s.with_safe_radius(estimate_safe_radius(s));
    }
    emit(cfg, dump(series_to_json(s)), out);
    return kExitOk;
}

int cmd_eval(const JobConfig& cfg, std::ostream& out) {
    const RationalMap f = load_map(cfg);
    const SchroederSeries s = load_series(f, cfg);
    std::vector<std::string> ws = cfg.w_texts;
    if (ws.empty()) {
        ws.emplace_back("0,0");
    }
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& t : ws) {
        const Cplx w = parse_complex(t);
        const HValue v = evaluate_h_detailed(s, w);
        nlohmann::ordered_json r;
        r["w"] = complex_json(w);
        r["h"] = sphere_point_json(v.value);
        r["depth"] = v.depth;
        r["error_estimate"] = v.error_estimate;
        rows.push_back(r);
    }
    nlohmann::ordered_json j;
    j["z0"] = complex_json(s.z0());
    j["lambda"] = complex_json(s.lambda());
    j["values"] = rows;
    emit(cfg, dump(j), out);
    return kExitOk;
}

int cmd_order(const JobConfig& cfg, std::ostream& out) {
    const RationalMap f = load_map(cfg);
    const SchroederSeries s = load_series(f, cfg);
    OrderOptions o;
    o.threads = cfg.threads;
    const GrowthProfile g = schroeder_growth(s, cfg.r_max, o);
    const DcaBudget dca = dca_budget(g.theoretical_order, f.is_polynomial());
    nlohmann::ordered_json j;
    j["d"] = f.degree();
    j["p"] = s.period();
    j["lambda"] = complex_json(s.lambda());
    j["theoretical_order"] = g.theoretical_order;
    j["empirical_order"] = g.slope;
    j["relative_error"] = std::abs(g.slope - g.theoretical_order) / g.theoretical_order;
    j["radii"] = g.radii.size();
    j["fit_begin"] = g.fit_begin;
    j["monotone"] = g.monotone();
    j["dca"]["direct"] = dca.direct;
    if (dca.finite) {
        j["dca"]["finite"] = *dca.finite;
    }
    if (!cfg.csv.empty()) {
        write_file(cfg.csv, growth_csv(g));
    }
    emit(cfg, dump(j), out);
    return kExitOk;
}

int cmd_tracts(const JobConfig& cfg, std::ostream& out) {
    const RationalMap f = load_map(cfg);
    const SchroederSeries s = load_series(f, cfg);
    std::vector<SpherePoint> values = values_from(cfg);
    if (values.empty()) {
        values = census_candidates(f);
    }
    const TractOptions t = tract_options(cfg);
    const Census census = singularity_census(as_function(s), f, s.period(), s.lambda(), values, t);
    const DynamicsSummary dyn = summarize_dynamics(f, 4, 10000, 1e-3, cfg.threads);
    const CrossCheck cross = singular_value_crosscheck(census, dyn);
    const double rho = valiron_order(f.degree(), s.period(), s.lambda());
    const DcaBudget dca = dca_budget(rho, f.is_polynomial());

    bool inconclusive = !cross.passed();
    nlohmann::ordered_json fam = nlohmann::ordered_json::array();
    for (std::size_t e = 0; e < census.entries.size(); ++e) {
        const auto& entry = census.entries[e];
        nlohmann::ordered_json j = tract_family_json(entry.family);
        j["periodic_chains"] = entry.periodic_chains;
        j["lambda_image"] = entry.action.image;
        j["lambda_injective"] = entry.action.injective;
        if (entry.image_entry && *entry.image_entry == e && !entry.family.chains.empty()) {
            j["lambda_permutation"] = entry.action.permutation;
        }
        fam.push_back(j);
        inconclusive = inconclusive || !entry.family.stable || entry.family.count(Verdict::Inconclusive) > 0;
        if (!cfg.pgm_dir.empty()) {
            std::filesystem::create_directories(cfg.pgm_dir);
            for (std::size_t i = 0; i < entry.family.masks.size(); ++i) {
                write_pgm(entry.family.masks[i][0],
                          (std::filesystem::path(cfg.pgm_dir) /
                           ("value" + std::to_string(e) + "_rung" + std::to_string(i) + ".pgm"))
                              .string());
            }
        }
    }
    nlohmann::ordered_json j;
    j["z0"] = complex_json(s.z0());
    j["lambda"] = complex_json(s.lambda());
    j["rho"] = rho;
    j["families"] = fam;
    j["census"]["direct"] = census.direct;
    j["census"]["indirect"] = census.indirect;
    j["census"]["finite_singular"] = census.finite_singular;
    j["dca"]["direct_bound"] = dca.direct;
    j["dca"]["direct_ok"] = static_cast<int>(census.direct) <= dca.direct;
    if (dca.finite) {
        j["dca"]["finite_bound"] = *dca.finite;
        j["dca"]["finite_ok"] = static_cast<int>(census.finite_singular) <= *dca.finite;
    }
    nlohmann::ordered_json dj;
    auto list = [](const std::vector<SpherePoint>& pts) {
        nlohmann::ordered_json a = nlohmann::ordered_json::array();
        for (const auto& p : pts) {
            a.push_back(sphere_point_json(p));
        }
        return a;
    };
    dj["attracting"] = list(dyn.attracting);
    dj["parabolic"] = list(dyn.parabolic);
    dj["indifferent"] = list(dyn.indifferent);
    dj["mane"] = list(dyn.mane);
    j["dynamics"] = dj;
    j["crosscheck"]["direct_in_attracting"] = cross.direct_in_attracting;
    j["crosscheck"]["periodic_in_at_pb"] = cross.periodic_in_at_pb;
    j["crosscheck"]["singular_in_unhyperbolic"] = cross.singular_in_unhyperbolic;
    j["crosscheck"]["discrepancies"] = cross.discrepancies;
    emit(cfg, dump(j), out);
    return inconclusive ? kExitInconclusive : kExitOk;
}

int cmd_ply(const JobConfig& cfg, std::ostream& out) {
    const RationalMap f = load_map(cfg);
    if (!f.is_polynomial()) {
        throw PreconditionError("the basin of infinity pipeline needs a polynomial map");
    }
    const SchroederSeries s = load_series(f, cfg);
    BasinOptions o;
    if (cfg.box > 0.0) {
        o.half_width = cfg.box;
    }
    if (cfg.grid > 0) {
        o.grid = cfg.grid;
    }
    o.threads = cfg.threads;
    const BasinReport r = basin_components_of_infinity(s, o);
    nlohmann::ordered_json j = ply_json(r.ply, r.accepted());
    j["p_arc"] = r.p_arc;
    j["cap"] = r.cap;
    j["artifact"] = r.artifact;
    j["consistent"] = r.consistent;
    j["spiral"] = r.spiral;
    j["spiral_closed_form"] = r.spiral_closed;
    j["half_width"] = r.half_width;
    j["diagnostics"] = r.diagnostics;
    emit(cfg, dump(j), out);
    return r.accepted() && !r.ply.violation ? kExitOk : kExitInconclusive;
}

int cmd_probe(const JobConfig& cfg, std::ostream& out) {
    const RationalMap f = load_map(cfg);
    std::vector<SpherePoint> values = values_from(cfg);
    if (values.size() > 1) {
        throw PreconditionError("probe takes a single --a value");
    }
    const ManeSetApprox mane = mane_set_approx(f, 10000, 1e-3, cfg.threads);
    nlohmann::ordered_json j;
    if (values.empty()) {
        j = unhyp_json(mane, nullptr);
    } else {
        ProbeOptions o;
        o.r = cfg.r;
        o.k_max = cfg.k_max;
        if (cfg.grid > 0) {
            o.grid = cfg.grid;
        }
        o.threads = cfg.threads;
        const ProbeReport p = semihyperbolicity_probe(f, values[0], o);
        j = unhyp_json(mane, &p);
    }
    emit(cfg, dump(j), out);
    return kExitOk;
}

int cmd_cover(const JobConfig& cfg, std::ostream& out) {
    const RationalMap f = load_map(cfg);
    const SchroederSeries s = load_series(f, cfg);
    const std::vector<SpherePoint> values = values_from(cfg);
    if (values.empty()) {
        throw PreconditionError("cover needs at least one --a value");
    }
    const SphereFunction h = as_function(s);
    const TractOptions t = tract_options(cfg);
    bool inconclusive = false;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& a : values) {
        if (a.is_infinity()) {
            throw PreconditionError("the covering probe takes finite values");
        }
        const CoverReport rep = complete_covering_probe(h, a, t);
        nlohmann::ordered_json r;
        r["a"] = sphere_point_json(a);
        r["verdict"] = std::string(to_string(rep.verdict));
        nlohmann::ordered_json rungs = nlohmann::ordered_json::array();
        for (const auto& g : rep.rungs) {
            rungs.push_back({{"r", g.r}, {"components", g.components}, {"persistent", g.persistent},
                             {"marginal", g.marginal}});
        }
        r["rungs"] = rungs;
        rows.push_back(r);
        inconclusive = inconclusive || rep.verdict == CoverVerdict::Inconclusive;
    }
    nlohmann::ordered_json j;
    j["z0"] = complex_json(s.z0());
    j["lambda"] = complex_json(s.lambda());
    j["values"] = rows;
    emit(cfg, dump(j), out);
    return inconclusive ? kExitInconclusive : kExitOk;
}

int cmd_render(const JobConfig& cfg, std::ostream& out) {
    const RationalMap f = load_map(cfg);
    const int n = cfg.grid > 0 ? cfg.grid : 512;
    const double R = cfg.box > 0.0 ? cfg.box : 2.0;
    ImageBuffer img;
    if (cfg.kind == "domain") {
        const SchroederSeries s = load_series(f, cfg);
        img = render_domain_coloring(as_function(s), Box::square(R), n, n, cfg.threads);
    } else if (cfg.kind == "julia") {
        img = render_escape_time(f, Box::square(R), n, n, cfg.max_iterations, cfg.threads);
    } else {
        throw PreconditionError("unknown render kind '" + cfg.kind + "' (domain or julia)");
    }
    emit(cfg, netpbm_bytes(img), out);
    return kExitOk;
}

int cmd_sweep(const JobConfig& cfg, std::ostream& out) {
    SweepOptions o;
    const auto r = parse_list(cfg.range);
    if (r.size() != 4 || !(r[1] > r[0]) || !(r[3] > r[2])) {
        throw PreconditionError("--range expects RE_MIN,RE_MAX,IM_MIN,IM_MAX with positive extent");
    }
    o.box = {r[0], r[1], r[2], r[3]};
    o.degree = cfg.degree;
    o.nx = o.ny = cfg.grid > 0 ? cfg.grid : 512;
    o.max_iterations = cfg.max_iterations;
    o.cover = cfg.cover;
    if (cfg.box > 0.0) {
        o.cover_box = cfg.box;
    }
    o.threads = cfg.threads;
    const auto cells = run_sweep(o);
    if (!cfg.heatmap.empty()) {
        write_netpbm(sweep_heatmap(o, cells), cfg.heatmap);
    }
    emit(cfg, sweep_csv(cells), out);
    return kExitOk;
}

void add_common(CLI::App* sc, JobConfig& cfg, bool needs_point) {
    sc->add_option("--map", cfg.map_file, "rational map as JSON {\"num\": [[re,im],...], \"den\": [...]}");
    sc->add_option("--c", cfg.c_text, "use z^2 + c (RE,IM) instead of a map file");
    if (needs_point) {
        sc->add_option("--z0", cfg.z0_text, "guess for the repelling periodic point (RE,IM)");
        sc->add_option("--period", cfg.period, "period of z0")->check(CLI::Range(1, 64));
        sc->add_option("--order-n", cfg.order_n, "series truncation order")->check(CLI::Range(2, 512));
    }
    sc->add_option("--out", cfg.out, "output path (stdout when omitted)");
    sc->add_option("--threads", cfg.threads, "worker threads")->check(CLI::Range(1u, 1024u));
}

void add_box_grid(CLI::App* sc, JobConfig& cfg) {
    sc->add_option("--box", cfg.box, "box half-width")->check(CLI::PositiveNumber);
    sc->add_option("--grid", cfg.grid, "grid side")->check(CLI::Range(8, kMaxImageSide));
}

} // namespace

SpherePoint parse_sphere_point(const std::string& text) {
    if (text == "inf" || text == "infinity") {
        return SpherePoint::infinity();
    }
    return parse_complex(text);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    JobConfig cfg;
    cfg.threads = default_thread_count();
    CLI::App app{"Schroeder maps of rational functions: coefficients, growth, tracts and basin structure",
                 "schroeder-lab"};
    app.set_config("--config", "", "TOML file with option values (command-line flags take precedence)");
    app.require_subcommand(1, 1);

    auto* coeffs = app.add_subcommand("coeffs", "Taylor coefficients of h at a repelling periodic point");
    add_common(coeffs, cfg, true);

    auto* eval = app.add_subcommand("eval", "evaluate h at points");
    add_common(eval, cfg, true);
    eval->add_option("--w", cfg.w_texts, "evaluation point RE,IM (repeatable)");

    auto* order = app.add_subcommand("order", "empirical growth order of h against log d^p / log|lambda|");
    add_common(order, cfg, true);
    order->add_option("--r-max", cfg.r_max, "largest radius")->check(CLI::PositiveNumber);
    order->add_option("--csv", cfg.csv, "write the growth profile as CSV");

    auto* tracts = app.add_subcommand("tracts", "tract census, lambda action and dynamical cross-check");
    add_common(tracts, cfg, true);
    add_box_grid(tracts, cfg);
    tracts->add_option("--a", cfg.a_texts, "value RE,IM or inf (repeatable; default: critical orbits and cycles)");
    tracts->add_option("--pgm-dir", cfg.pgm_dir, "export rung masks as PGM files");

    auto* ply = app.add_subcommand("ply", "components of the basin of infinity and the rotation inequality");
    add_common(ply, cfg, true);
    add_box_grid(ply, cfg);

    auto* probe = app.add_subcommand("probe", "critical orbits, omega-limits and covering-degree probe");
    add_common(probe, cfg, false);
    probe->add_option("--grid", cfg.grid, "grid side per sphere chart")->check(CLI::Range(8, kMaxImageSide));
    probe->add_option("--a", cfg.a_texts, "probe value RE,IM or inf");
    probe->add_option("--r", cfg.r, "chordal radius of the probed disk")->check(CLI::Range(1e-12, 0.999));
    probe->add_option("--k-max", cfg.k_max, "deepest iterate")->check(CLI::Range(1, 64));

    auto* cover = app.add_subcommand("cover", "complete-covering probe of h over values");
    add_common(cover, cfg, true);
    add_box_grid(cover, cfg);
    cover->add_option("--a", cfg.a_texts, "value RE,IM (repeatable)");

    auto* render = app.add_subcommand("render", "domain colouring of h or escape-time image of f (PPM/PGM)");
    add_common(render, cfg, true);
    add_box_grid(render, cfg);
    render->add_option("--kind", cfg.kind, "domain or julia");
    render->add_option("--max-iter", cfg.max_iterations, "escape iterations")->check(CLI::Range(1, 1000000));

    auto* sweep = app.add_subcommand("sweep", "parameter sweep over z^d + c");
    sweep->add_option("--out", cfg.out, "CSV output path (stdout when omitted)");
    sweep->add_option("--threads", cfg.threads, "worker threads")->check(CLI::Range(1u, 1024u));
    sweep->add_option("--grid", cfg.grid, "cells per side")->check(CLI::Range(1, kMaxImageSide));
    sweep->add_option("--range", cfg.range, "RE_MIN,RE_MAX,IM_MIN,IM_MAX");
    sweep->add_option("--degree", cfg.degree, "d in z^d + c")->check(CLI::Range(2, 64));
    sweep->add_option("--max-iter", cfg.max_iterations, "escape iterations")->check(CLI::Range(1, 1000000));
    sweep->add_flag("--cover", cfg.cover, "run the covering probe on cells with an attracting cycle");
    sweep->add_option("--box", cfg.box, "box half-width for the covering probe")->check(CLI::PositiveNumber);
    sweep->add_option("--heatmap", cfg.heatmap, "write the membership heatmap (PPM)");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }

    try {
        const CLI::App* sc = app.get_subcommands().front();
        const std::string& name = sc->get_name();
        if (name == "coeffs") {
            return cmd_coeffs(cfg, out);
        }
        if (name == "eval") {
            return cmd_eval(cfg, out);
        }
        if (name == "order") {
            return cmd_order(cfg, out);
        }
        if (name == "tracts") {
            return cmd_tracts(cfg, out);
        }
        if (name == "ply") {
            return cmd_ply(cfg, out);
        }
        if (name == "probe") {
            return cmd_probe(cfg, out);
        }
        if (name == "cover") {
            return cmd_cover(cfg, out);
        }
        if (name == "render") {
            return cmd_render(cfg, out);
        }
        return cmd_sweep(cfg, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

} // namespace schroeder
