// SPDX-License-Identifier: Apache-2.0
//
// sphcov - spherical coverage evaluation for millimeter-wave UE antenna designs
// Copyright (C) 2026 The sphcov authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sphcov/sphcov.hpp"

namespace fs = std::filesystem;
using namespace sphcov;

namespace
{

// Collects finished outputs; every file goes through a temporary and a rename, and on failure all files of the
// run are removed.
class OutputSet
{
public:
    void write(const fs::path &path, const std::function<void(std::ostream &)> &body)
    {
        if (path.has_parent_path())
            fs::create_directories(path.parent_path());
        const fs::path tmp = path.string() + ".part";
        {
            std::ofstream os(tmp, std::ios::binary);
            if (!os)
                throw std::runtime_error("cannot write '" + tmp.string() + "'");
            body(os);
            os.flush();
            if (!os)
            {
                os.close();
                fs::remove(tmp);
                throw std::runtime_error("write failed for '" + path.string() + "'");
            }
        }
        fs::rename(tmp, path);
        written_.push_back(path);
        std::cout << "wrote " << path.string() << '\n';
    }

    void discard() noexcept
    {
        for (const auto &p : written_)
        {
            std::error_code ec;
            fs::remove(p, ec);
        }
        written_.clear();
    }

private:
    std::vector<fs::path> written_;
};

fs::path output_dir()
{
    const char *env = std::getenv("SPHCOV_OUT_DIR");
    return env && *env ? fs::path(env) : fs::path(".");
}

fs::path output_path(const RunConfig &c, const std::string &default_name)
{
    return c.out.empty() ? output_dir() / default_name : fs::path(c.out);
}

// Flags shared by the subcommands; each overrides the config file only when given.
struct CommonFlags
{
    std::string config_file;
    RunConfig flags;
    std::string seed_text;

    void add(CLI::App *app, bool with_scheme = true, bool with_blockage = true)
    {
        app->add_option("--config", config_file, "JSON run configuration")->check(CLI::ExistingFile);
        app->add_option("--design", flags.design, "built-in design: face, edge, design3, design4");
        app->add_option("--design-file", flags.design_file, "custom design JSON")->check(CLI::ExistingFile);
        if (with_scheme)
            app->add_option("--scheme", flags.scheme, "mrc, egc, cbk or antsel");
        if (with_blockage)
        {
            app->add_option("--blockage", flags.blockage, "none, portrait or landscape");
            app->add_option("--model", flags.model, "blockage model: 1, 2 or 2-mean");
        }
        app->add_option("--seed", seed_text, "seed for randomized steps");
        app->add_option("--grid-step", flags.grid_step, "grid resolution in degrees");
        app->add_option("--combining", flags.combining, "MRC/EGC combining scope: subarray or module");
        app->add_option("--metric", flags.metric, "polarization metric: total or max");
        app->add_option("--phase-bits", flags.phase_bits, "phase shifter resolution");
        app->add_option("--out", flags.out, "output file (default: $SPHCOV_OUT_DIR or the working directory)");
        app_ = app;
    }

    RunConfig resolve() const
    {
        RunConfig c = config_file.empty() ? RunConfig{} : load_run_config(config_file);
        auto given = [&](const char *name) { return app_->get_option_no_throw(name) && app_->count(name) > 0; };
        if (given("--design"))
        {
            c.design = flags.design;
            c.design_file.clear();
        }
        if (given("--design-file"))
            c.design_file = flags.design_file;
        if (given("--scheme"))
            c.scheme = flags.scheme;
        if (given("--blockage"))
            c.blockage = flags.blockage;
        if (given("--model"))
            c.model = flags.model;
        if (given("--seed"))
        {
            std::size_t used = 0;
            unsigned long long v = 0;
            try
            {
                v = std::stoull(seed_text, &used);
            }
            catch (const std::exception &)
            {
                used = 0;
            }
            if (used == 0 || used != seed_text.size() || seed_text.front() == '-')
                throw ConfigError("--seed must be a nonnegative integer, got '" + seed_text + "'");
            c.seed = v;
        }
        if (given("--grid-step"))
            c.grid_step = flags.grid_step;
        if (given("--combining"))
            c.combining = flags.combining;
        if (given("--metric"))
            c.metric = flags.metric;
        if (given("--phase-bits"))
            c.phase_bits = flags.phase_bits;
        if (given("--out"))
            c.out = flags.out;
        c.validate();
        return c;
    }

    CLI::App *app_ = nullptr;
};

std::string design_label(const RunConfig &c, const DesignSpec &spec)
{
    return c.design_file.empty() ? c.design : spec.name;
}

void echo_config(const RunConfig &c)
{
    std::cout << "config " << to_json(c).dump() << '\n';
}

// Gain map for one run: scheme evaluation followed by the optional blockage transform.
GainMap run_map(const RunConfig &c)
{
    const auto spec = c.design_spec();
    const auto design = realize_design(spec, c.make_run_grid());
    const auto scheme = parse_scheme(c.scheme);
    const EvaluateOptions opt{parse_combining_scope(c.combining), parse_metric(c.metric)};
    GainMap map;
    if (scheme == Scheme::cbk)
        map = evaluate_design(design, scheme, generate_design_codebook(design, c.phase_bits), opt);
    else
        map = evaluate_design(design, scheme, nullptr, opt);
    map.design = design_label(c, spec);
    if (const auto region = c.region())
    {
        map = apply_blockage(map, *region, c.blockage_model(), c.seed);
        map.blockage = c.blockage + "-m" + c.model;
    }
    return map;
}

std::string percentile_table(const CoverageCdf &cdf)
{
    std::ostringstream os;
    char buf[64];
    os << "percentile  gain_db\n";
    for (int p : {95, 75, 50, 30, 5})
    {
        std::snprintf(buf, sizeof buf, "%10d  %8.3f\n", p, percentile(cdf, p / 100.0));
        os << buf;
    }
    return os.str();
}

int cmd_eval(const CommonFlags &f, OutputSet &out)
{
    const auto c = f.resolve();
    echo_config(c);
    const auto cdf = spherical_cdf(run_map(c));
    out.write(output_path(c, cdf.label() + "_cdf.csv"), [&](std::ostream &os) { write_cdf_csv(cdf, os); });
    std::cout << cdf.label() << " (" << cdf.metric << ")\n" << percentile_table(cdf);
    return 0;
}

// A run spec is either a JSON config file or design[:scheme[:blockage[:model]]]; unspecified fields come
// from the shared flags.
RunConfig run_from_spec(const std::string &s, const RunConfig &base)
{
    RunConfig c = base;
    if (s.size() > 5 && s.substr(s.size() - 5) == ".json")
    {
        c = load_run_config(s);
    }
    else
    {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        for (std::string p; std::getline(ss, p, ':');)
            parts.push_back(p);
        if (parts.empty() || parts.size() > 4)
            throw ConfigError("bad run spec '" + s + "' (expected design[:scheme[:blockage[:model]]])");
        c.design = parts[0];
        c.design_file.clear();
        if (parts.size() > 1)
            c.scheme = parts[1];
        if (parts.size() > 2)
            c.blockage = parts[2];
        if (parts.size() > 3)
            c.model = parts[3];
    }
    c.validate();
    return c;
}

int cmd_compare(const CommonFlags &f, const std::vector<std::string> &runs, OutputSet &out)
{
    if (runs.size() < 2)
        throw ConfigError("compare needs at least two runs");
    const auto base = f.resolve();
    std::vector<CoverageCdf> cdfs;
    for (const auto &r : runs)
    {
        const auto c = run_from_spec(r, base);
        echo_config(c);
        cdfs.push_back(spherical_cdf(run_map(c)));
    }
    const auto table = compare(cdfs);
    std::string name = "compare";
    for (const auto &l : table.labels)
        name += "_" + l;
    out.write(output_path(base, name + ".csv"), [&](std::ostream &os) { write_comparison_csv(table, os); });

    char buf[64];
    std::cout << "percentile";
    for (const auto &l : table.labels)
        std::cout << "  " << l;
    std::cout << '\n';
    for (const auto &row : table.rows)
    {
        std::snprintf(buf, sizeof buf, "%10d", static_cast<int>(std::lround(row.percentile * 100)));
        std::cout << buf;
        for (double g : row.gain_db)
        {
            std::snprintf(buf, sizeof buf, "  %8.3f", g);
            std::cout << buf;
        }
        std::cout << '\n';
    }
    if (table.crossovers.empty())
        std::cout << "no crossovers\n";
    for (const auto &x : table.crossovers)
        std::cout << "crossover " << table.labels[0] << " vs " << table.labels[x.against] << " at percentile "
                  << std::lround(x.percentile * 100) << '\n';
    return 0;
}

int cmd_report(const CommonFlags &f)
{
    const auto c = f.resolve();
    char buf[160];
    struct Ref
    {
        const char *name;
        BlockageRegion region;
        double published;
    };
    const auto grid = make_grid(1.0, 1.0);
    for (const auto &r : {Ref{"portrait", BlockageRegion::portrait(), 21.07},
                          Ref{"landscape", BlockageRegion::landscape(), 26.00}})
    {
        std::snprintf(buf, sizeof buf, "%-9s physical %.2f%%, solid-angle %.2f%% (reference: %.2f%%)\n", r.name,
                      physical_angle_fraction(r.region), cdf_loss_fraction(r.region), r.published);
        std::cout << buf;
        const double mid = integrate(*grid, [&](const Direction &d) { return region_indicator(d, r.region); });
        const double closed =
            integrate(*grid, [&](const Direction &d) { return is_blocked(d, r.region) ? 1.0 : 0.0; });
        std::snprintf(buf, sizeof buf, "          1-degree grid %.2f%% (boundary cells halved), %.2f%% (inclusive)\n",
                      mid / four_pi * 100.0, closed / four_pi * 100.0);
        std::cout << buf;
    }

    const auto spec = c.design_spec();
    const auto design = realize_design(spec, make_grid(c.grid_step, c.grid_step));
    const auto cb = generate_design_codebook(design, c.phase_bits);
    std::snprintf(buf, sizeof buf, "%s: %zu modules, %zu subarrays, %zu elements\n", design_label(c, spec).c_str(),
                  design.modules().size(), design.subarray_count(), design.element_count());
    std::cout << buf;
    std::snprintf(buf, sizeof buf, "codebook %zu beams, acquisition %g ms\n", cb.size(), acquisition_overhead(design));
    std::cout << buf;
    std::snprintf(buf, sizeof buf, "refinement (4 beams): CSI-RS %.2f ms (%.3f ms of symbols), SSB %g ms\n",
                  refinement_overhead(4, RefinementMode::csirs), refinement_symbol_time(4),
                  refinement_overhead(4, RefinementMode::ssb));
    std::cout << buf;
    return 0;
}

int cmd_codebook(const CommonFlags &f, OutputSet &out)
{
    const auto c = f.resolve();
    echo_config(c);
    const auto spec = c.design_spec();
    const auto design = realize_design(spec, c.make_run_grid());
    const auto cb = generate_design_codebook(design, c.phase_bits);
    out.write(output_path(c, design_label(c, spec) + "_codebook.csv"), [&](std::ostream &os) { save_codebook(cb, os); });
    std::cout << cb.size() << " beams\n";
    return 0;
}

int cmd_design(const CommonFlags &f, OutputSet &out)
{
    const auto c = f.resolve();
    const auto spec = c.design_spec();
    out.write(output_path(c, design_label(c, spec) + "_design.json"),
              [&](std::ostream &os) { os << design_to_json(spec).dump(2) << '\n'; });
    return 0;
}

struct SlsFlags
{
    std::size_t drops = 0;
    std::string ue;
    double eirp = 0, nf = 0, distance = 0, cap = 0;
};

int cmd_sls(const CommonFlags &f, const SlsFlags &s, CLI::App *app, OutputSet &out)
{
    auto c = f.resolve();
    if (app->count("--drops"))
        c.drops = s.drops;
    if (app->count("--ue"))
        c.ue_combining = s.ue;
    if (app->count("--eirp"))
        c.link.eirp_dbm = s.eirp;
    if (app->count("--noise-figure"))
        c.link.noise_figure_db = s.nf;
    if (app->count("--distance"))
        c.link.distance_m = s.distance;
    if (app->count("--se-cap"))
        c.link.se_cap_bps_hz = s.cap;
    if (!c.seed)
        c.seed = 1;
    c.validate();
    echo_config(c);

    const auto spec = c.design_spec();
    const auto design = realize_design(spec, c.make_run_grid());
    const auto cb = generate_design_codebook(design, c.phase_bits);
    LinkOptions opt;
    opt.ue = c.ue_combining == "mrc" ? UeCombining::mrc : UeCombining::codebook;
    opt.blockage = c.region();
    opt.blockage_model = c.blockage_model();
    const auto drops = run_drops(design, cb, c.link, c.drops, *c.seed, opt);

    std::string name = design_label(c, spec) + "_sls";
    if (c.blockage != "none")
        name += "_" + c.blockage + "-m" + c.model;
    out.write(output_path(c, name + ".csv"), [&](std::ostream &os) { write_drops_csv(drops, os); });

    std::vector<double> se;
    for (const auto &d : drops)
        se.push_back(d.link.se_per_layer);
    std::sort(se.begin(), se.end());
    double mean = 0.0;
    for (double v : se)
        mean += v;
    mean /= static_cast<double>(se.size());
    char buf[128];
    auto at = [&](double p) { return se[static_cast<std::size_t>(p * static_cast<double>(se.size() - 1))]; };
    std::snprintf(buf, sizeof buf, "%zu drops: mean %.3f, 10%% %.3f, 50%% %.3f, 90%% %.3f bps/Hz per layer\n",
                  se.size(), mean, at(0.1), at(0.5), at(0.9));
    std::cout << buf;
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Spherical coverage evaluation of millimeter-wave UE antenna designs"};
    app.require_subcommand(1);

    CommonFlags eval_f, cmp_f, rep_f, cb_f, des_f, sls_f;
    auto *eval = app.add_subcommand("eval", "coverage CDF of one design/scheme/blockage run");
    eval_f.add(eval);
    auto *cmp = app.add_subcommand("compare", "percentile table of two or more runs");
    cmp_f.add(cmp);
    std::vector<std::string> runs;
    cmp->add_option("runs", runs, "design[:scheme[:blockage[:model]]] or run config .json")->required();
    auto *rep = app.add_subcommand("report", "blocked fractions, codebook size and beam-management overheads");
    rep_f.add(rep, false, false);
    auto *cbk = app.add_subcommand("codebook", "write the steering codebook of a design");
    cb_f.add(cbk, false, false);
    auto *des = app.add_subcommand("design", "write a design as JSON (starting point for custom designs)");
    des_f.add(des, false, false);
    auto *sls = app.add_subcommand("sls", "single-link spectral efficiency drops");
    sls_f.add(sls, false, true);
    SlsFlags s;
    sls->add_option("--drops", s.drops, "number of drops");
    sls->add_option("--ue", s.ue, "UE combining: codebook or mrc");
    sls->add_option("--eirp", s.eirp, "EIRP, dBm");
    sls->add_option("--noise-figure", s.nf, "noise figure, dB");
    sls->add_option("--distance", s.distance, "link distance, m");
    sls->add_option("--se-cap", s.cap, "spectral efficiency cap, bps/Hz");

    CLI11_PARSE(app, argc, argv);

    OutputSet out;
    try
    {
        if (*eval)
            return cmd_eval(eval_f, out);
        if (*cmp)
            return cmd_compare(cmp_f, runs, out);
        if (*rep)
            return cmd_report(rep_f);
        if (*cbk)
            return cmd_codebook(cb_f, out);
        if (*des)
            return cmd_design(des_f, out);
        if (*sls)
            return cmd_sls(sls_f, s, sls, out);
    }
    catch (const std::exception &e)
    {
        out.discard();
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
