// atslab: regime classification, pricing, smile/skew/surface generation and
// validation for the power-law scaling additive normal tempered stable model.
//
// Exit codes: 0 success, 1 config error, 2 inadmissible parameters,
// 3 validation failure.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "atslab/ats_model.hpp"
#include "atslab/parallel.hpp"
#include "atslab/pricer.hpp"
#include "atslab/validation.hpp"
#include "atslab/vol_surface.hpp"

namespace {

using nlohmann::json;

// Shortest round-trip decimal representation (std::to_chars), '.' decimal.
std::string fmt(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct RunConfig {
    atslab::AtsParams params{0.0, 1.0, -0.5, 1.0, 1.0, 0.2};
    std::vector<double> t_grid;
    std::vector<double> y_grid;
    std::vector<double> alphas{0.0, 0.25, 0.5, 0.75};
    std::vector<double> k_grid;
    std::vector<double> se_grid;
    std::uint64_t seed = 20240517;
    std::string format = "csv";
    std::string out;
    int threads = 0;  // 0: resolve via ATSLAB_THREADS / hardware
    double rel_tol = 1e-9;
    double fd_step = 1e-4;
    std::size_t mc_paths = 1000000;
};

std::vector<double> default_surface_axis() {
    std::vector<double> g(31);
    for (int i = 0; i < 31; ++i) g[i] = 0.05 + (3.0 - 0.05) * i / 30.0;
    return g;
}

void load_config_file(const std::string& path, RunConfig* cfg) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j = json::parse(in);
    if (j.contains("params")) cfg->params = j["params"].get<atslab::AtsParams>();
    if (j.contains("t")) cfg->t_grid = j["t"].get<std::vector<double>>();
    if (j.contains("y")) cfg->y_grid = j["y"].get<std::vector<double>>();
    if (j.contains("alphas")) cfg->alphas = j["alphas"].get<std::vector<double>>();
    if (j.contains("k_grid")) cfg->k_grid = j["k_grid"].get<std::vector<double>>();
    if (j.contains("se_grid")) cfg->se_grid = j["se_grid"].get<std::vector<double>>();
    if (j.contains("seed")) cfg->seed = j["seed"].get<std::uint64_t>();
    if (j.contains("format")) cfg->format = j["format"].get<std::string>();
    if (j.contains("out")) cfg->out = j["out"].get<std::string>();
    if (j.contains("threads")) cfg->threads = j["threads"].get<int>();
    if (j.contains("tolerances")) {
        const json& tol = j["tolerances"];
        if (tol.contains("rel_tol")) cfg->rel_tol = tol["rel_tol"].get<double>();
        if (tol.contains("fd_step")) cfg->fd_step = tol["fd_step"].get<double>();
    }
    if (j.contains("mc_paths")) cfg->mc_paths = j["mc_paths"].get<std::size_t>();
}

void check_grid(const std::vector<double>& g, const char* name) {
    if (g.empty()) throw std::runtime_error(std::string(name) + " grid is empty");
    for (std::size_t i = 0; i + 1 < g.size(); ++i)
        if (!(g[i] < g[i + 1]))
            throw std::runtime_error(std::string(name) + " grid must be strictly increasing");
}

void write_output(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + cfg.out);
    f << text;
}

std::string sanitize_csv(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n') c = ';';
    return s;
}

int cmd_classify(const RunConfig& cfg) {
    const atslab::ValidationReport rep = atslab::validate(cfg.params);
    const atslab::RegimeCase rc = atslab::classify(cfg.params);
    std::string line = atslab::describe(rc);
    if (!rep.ok) line += " (" + rep.violation + ")";
    write_output(cfg, line + "\n");
    return rep.ok ? 0 : 2;
}

int cmd_smile(const RunConfig& cfg) {
    check_grid(cfg.t_grid, "t");
    check_grid(cfg.y_grid, "y");
    struct Row {
        double t, y, price, iv, tol;
        std::string error;
    };
    const std::size_t nt = cfg.t_grid.size(), ny = cfg.y_grid.size();
    std::vector<Row> rows(nt * ny);
    atslab::parallel_for(nt, atslab::resolve_threads(cfg.threads), [&](std::size_t it) {
        const double t = cfg.t_grid[it];
        std::optional<atslab::detail::PricingContext> ctx;
        std::string ctx_error;
        try {
            ctx.emplace(cfg.params, t);
        } catch (const std::exception& e) {
            ctx_error = e.what();
        }
        for (std::size_t iy = 0; iy < ny; ++iy) {
            const double y = cfg.y_grid[iy];
            Row& row = rows[it * ny + iy];
            row = {t, y, std::nan(""), std::nan(""), std::nan(""), ctx_error};
            if (!ctx) continue;
            try {
                const double price = ctx->price(y, atslab::OptionKind::call, cfg.rel_tol);
                const atslab::OptionSpec spec{t, y, atslab::OptionKind::call};
                const double iv = atslab::implied_vol(price, spec);
                row.price = price;
                row.iv = iv;
                row.tol = std::abs(atslab::black_price(iv, spec) - price);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    });

    const bool any_error =
        std::any_of(rows.begin(), rows.end(), [](const Row& r) { return !r.error.empty(); });
    if (cfg.format == "json") {
        json arr = json::array();
        for (const Row& r : rows) {
            json o{{"t", r.t}, {"y", r.y}, {"price", r.price},
                   {"implied_vol", r.iv}, {"achieved_tol", r.tol}};
            if (!r.error.empty()) o["error"] = r.error;
            arr.push_back(o);
        }
        write_output(cfg, arr.dump(2) + "\n");
        return 0;
    }
    std::string out = any_error ? "t,y,price,implied_vol,achieved_tol,error\n"
                                : "t,y,price,implied_vol,achieved_tol\n";
    for (const Row& r : rows) {
        out += fmt(r.t) + "," + fmt(r.y) + "," + fmt(r.price) + "," + fmt(r.iv) + "," +
               fmt(r.tol);
        if (any_error) out += "," + sanitize_csv(r.error);
        out += "\n";
    }
    write_output(cfg, out);
    return 0;
}

int cmd_skew(const RunConfig& cfg) {
    check_grid(cfg.t_grid, "t");
    struct Row {
        double t, vol, closed, fd, x_units;
    };
    std::vector<Row> rows(cfg.t_grid.size());
    atslab::parallel_for(cfg.t_grid.size(), atslab::resolve_threads(cfg.threads),
                         [&](std::size_t i) {
                             const double t = cfg.t_grid[i];
                             const double vol = atslab::atm_vol(t, cfg.params);
                             const double sc = atslab::skew_term_closed(t, cfg.params);
                             const double sf = atslab::skew_term_fd(t, cfg.params, cfg.fd_step);
                             rows[i] = {t, vol, sc, sf, sc / std::sqrt(t)};
                         });
    if (cfg.format == "json") {
        json arr = json::array();
        for (const Row& r : rows)
            arr.push_back(json{{"t", r.t}, {"atm_vol", r.vol}, {"skew_closed", r.closed},
                               {"skew_fd", r.fd}, {"skew_x_units", r.x_units}});
        write_output(cfg, arr.dump(2) + "\n");
        return 0;
    }
    std::string out = "t,atm_vol,skew_closed,skew_fd,skew_x_units\n";
    for (const Row& r : rows)
        out += fmt(r.t) + "," + fmt(r.vol) + "," + fmt(r.closed) + "," + fmt(r.fd) + "," +
               fmt(r.x_units) + "\n";
    write_output(cfg, out);
    return 0;
}

int cmd_surface(RunConfig cfg) {
    if (cfg.k_grid.empty()) cfg.k_grid = default_surface_axis();
    if (cfg.se_grid.empty()) cfg.se_grid = default_surface_axis();
    check_grid(cfg.alphas, "alphas");
    check_grid(cfg.k_grid, "k");
    check_grid(cfg.se_grid, "se");
    const auto rows = atslab::skew_surface(cfg.alphas, cfg.k_grid, cfg.se_grid,
                                           atslab::resolve_threads(cfg.threads));

    // Diagnostic monotonicity flags (Figures 3-4: nonincreasing in both axes).
    for (std::size_t ia = 0; ia < cfg.alphas.size(); ++ia) {
        bool mono_se = true, mono_k = true;
        const std::size_t nk = cfg.k_grid.size(), ns = cfg.se_grid.size();
        for (std::size_t ik = 0; ik < nk; ++ik)
            for (std::size_t is = 0; is + 1 < ns; ++is)
                mono_se &= rows[(ia * nk + ik) * ns + is + 1].xi0 <=
                           rows[(ia * nk + ik) * ns + is].xi0 + 1e-12;
        for (std::size_t is = 0; is < ns; ++is)
            for (std::size_t ik = 0; ik + 1 < nk; ++ik)
                mono_k &= rows[(ia * nk + ik + 1) * ns + is].xi0 <=
                          rows[(ia * nk + ik) * ns + is].xi0 + 1e-12;
        std::cerr << "alpha=" << cfg.alphas[ia] << " nonincreasing_in_k=" << mono_k
                  << " nonincreasing_in_se=" << mono_se << "\n";
    }

    if (cfg.format == "json") {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back(json{{"alpha", r.alpha}, {"k_bar", r.k_bar},
                               {"sigma_eta", r.sigma_eta}, {"xi0", r.xi0}});
        write_output(cfg, arr.dump(2) + "\n");
        return 0;
    }
    std::string out = "alpha,k_bar,sigma_eta,xi0\n";
    for (const auto& r : rows)
        out += fmt(r.alpha) + "," + fmt(r.k_bar) + "," + fmt(r.sigma_eta) + "," + fmt(r.xi0) +
               "\n";
    write_output(cfg, out);
    return 0;
}

int cmd_validate(const RunConfig& cfg) {
    atslab::ValidationConfig vc;
    vc.seed = cfg.seed;
    vc.mc_paths = cfg.mc_paths;
    const auto checks = atslab::run_validation_suite(vc);
    json arr = json::array();
    for (const auto& c : checks)
        arr.push_back(json{{"name", c.name}, {"status", c.pass ? "pass" : "fail"},
                           {"observed", c.observed}, {"bound", c.bound},
                           {"tolerance", c.tolerance}});
    const bool ok = atslab::all_passed(checks);
    json report{{"checks", arr}, {"all_passed", ok}};
    write_output(cfg, report.dump(2) + "\n");
    return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"additive normal tempered stable short-time smile toolkit"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--alpha", cfg.params.alpha);
        sub->add_option("--beta", cfg.params.beta);
        sub->add_option("--delta", cfg.params.delta);
        sub->add_option("--k-bar", cfg.params.k_bar);
        sub->add_option("--eta-bar", cfg.params.eta_bar);
        sub->add_option("--sigma-bar", cfg.params.sigma_bar);
        sub->add_option("--seed", cfg.seed);
        sub->add_option("--format", cfg.format)->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", cfg.out);
        sub->add_option("--threads", cfg.threads);
        sub->add_option("--rel-tol", cfg.rel_tol);
    };

    CLI::App* classify = app.add_subcommand("classify", "regime classification (Table 1)");
    add_common(classify);

    CLI::App* smile = app.add_subcommand("smile", "implied-vol smile over a (t,y) grid");
    add_common(smile);
    smile->add_option("--t", cfg.t_grid)->delimiter(',');
    smile->add_option("--y", cfg.y_grid)->delimiter(',');

    CLI::App* skew = app.add_subcommand("skew", "ATM vol and skew term per maturity");
    add_common(skew);
    skew->add_option("--t", cfg.t_grid)->delimiter(',');
    skew->add_option("--fd-step", cfg.fd_step);

    CLI::App* surface = app.add_subcommand("surface", "short-time skew surface (Figs 3-4)");
    add_common(surface);
    surface->add_option("--alphas", cfg.alphas)->delimiter(',');
    surface->add_option("--k-grid", cfg.k_grid)->delimiter(',');
    surface->add_option("--se-grid", cfg.se_grid)->delimiter(',');

    CLI::App* validate = app.add_subcommand("validate", "cross-module invariant suite");
    add_common(validate);
    validate->add_option("--paths", cfg.mc_paths);

    // Parse the config file first (if any), then let flags override it.
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (!config_path.empty()) {
            RunConfig file_cfg;
            load_config_file(config_path, &file_cfg);
            // Re-apply command line on top of the file config.
            cfg = file_cfg;
            try {
                app.clear();
                app.parse(argc, argv);
            } catch (const CLI::ParseError&) {
                return 1;
            }
        }
        if (classify->parsed()) return cmd_classify(cfg);
        if (smile->parsed()) return cmd_smile(cfg);
        if (skew->parsed()) return cmd_skew(cfg);
        if (surface->parsed()) return cmd_surface(cfg);
        if (validate->parsed()) return cmd_validate(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
