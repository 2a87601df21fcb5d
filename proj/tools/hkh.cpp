#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hk/cli.hpp"

namespace {

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

int emit(const hk::cli::Outcome& o, const std::string& out_path) {
    const std::string text = o.report.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path);
        if (!f) {
            std::cerr << "hkh: cannot write " << out_path << "\n";
            return hk::cli::kParse;
        }
        f << text;
    }
    if (o.report.contains("error")) std::cerr << "hkh: " << o.report["error"]["message"].get<std::string>() << "\n";
    return o.code;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* t = std::getenv("HKMETRIC_THREADS")) {
        int k = std::atoi(t);
        if (k > 0) omp_set_num_threads(k);
    }

    CLI::App app{"hkh: pseudo-hyperkahler metrics from harmonic prepotentials"};
    app.require_subcommand(1);

    std::string job_path, out_path, points_path, backend;
    int order = 0;
    std::uint64_t seed = 0;
    bool timings = false, skip_geometry = false, corrupt = false;

    auto add_common = [&](CLI::App* c, bool with_job) {
        if (with_job) c->add_option("job", job_path, "JobSpec JSON file")->required();
        c->add_option("--order", order, "truncation order D (overrides the job)");
        if (with_job) c->add_option("--backend", backend, "exact | float (overrides the job)");
        c->add_option("--seed", seed, "seed for U samples and chart points (overrides the job)");
        c->add_option("--out", out_path, "write the JSON report here instead of stdout");
    };

    auto* validate = app.add_subcommand("validate", "check a prepotential file");
    add_common(validate, true);
    auto* build = app.add_subcommand("build", "full pipeline with residuals, curvature and metric samples");
    add_common(build, true);
    build->add_flag("--timings", timings, "add wall-clock timings (makes the report non-reproducible)");
    build->add_flag("--skip-geometry", skip_geometry, "stop after the frame and curvature stages");
    auto* roundtrip = app.add_subcommand("roundtrip", "L -> frame -> extracted L, coefficient-exact");
    add_common(roundtrip, true);
    roundtrip->add_flag("--corrupt", corrupt, "test hook: double the v-potential before extraction");
    auto* metric = app.add_subcommand("metric", "metric, reality and section checks at chart points");
    add_common(metric, true);
    metric->add_option("--points", points_path, "JSON array of chart coordinate arrays");
    auto* flat = app.add_subcommand("flat-test", "L = 0 regression for n = 1 and n = 2");
    add_common(flat, false);
    int flat_points = 20;
    flat->add_option("--points", flat_points, "chart points per dimension");

    CLI11_PARSE(app, argc, argv);

    hk::cli::RunOptions opt;
    if (order > 0) opt.order = order;
    if (!backend.empty()) opt.backend = backend;
    if (seed > 0) opt.seed = seed;
    opt.timings = timings;
    opt.skip_geometry = skip_geometry;
    opt.corrupt = corrupt;

    if (flat->parsed()) {
        std::vector<hk::Dims> dims{hk::Dims(1, 1, 0), hk::Dims(2, 2, 0), hk::Dims(2, 1, 1)};
        return emit(hk::cli::cmd_flat_test(dims, order > 0 ? order : 6, flat_points, seed > 0 ? seed : 1), out_path);
    }

    std::string text;
    if (!read_file(job_path, text)) {
        std::cerr << "hkh: cannot read " << job_path << "\n";
        return hk::cli::kParse;
    }
    if (validate->parsed()) return emit(hk::cli::cmd_validate(text, opt), out_path);
    if (build->parsed()) return emit(hk::cli::cmd_build(text, opt), out_path);
    if (roundtrip->parsed()) return emit(hk::cli::cmd_roundtrip(text, opt), out_path);

    if (!points_path.empty()) {
        std::string pts;
        if (!read_file(points_path, pts)) {
            std::cerr << "hkh: cannot read " << points_path << "\n";
            return hk::cli::kParse;
        }
        try {
            opt.points = hk::cli::parse_points(pts);
        } catch (const hk::Error& e) {
            std::cerr << "hkh: " << e.what() << "\n";
            return hk::cli::exit_code(e.kind());
        }
    }
    return emit(hk::cli::cmd_metric(text, opt), out_path);
}
