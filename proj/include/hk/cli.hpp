#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hk/geometry.hpp"

namespace hk::cli {

enum Exit { kOk = 0, kValidation = 1, kParse = 2, kResidual = 3, kNumeric = 4 };

int exit_code(ErrorKind k);

struct TermSpec {
    GaussQ coeff;
    std::array<int, 4> u{0, 0, 0, 0};
    std::vector<int> zminus;
};

struct JobSpec {
    Dims dims;
    int order = 6;
    std::vector<TermSpec> terms;
    double radius = 0.1;
    int steps = 16;
    int sample_points = 10;
    std::string backend = "exact";
    std::uint64_t seed = 1;
};

// Throws Error(ParseError) with line and column for malformed JSON, and for schema violations.
JobSpec parse_job(const std::string& text);
nlohmann::json job_to_json(const JobSpec& job);

template <class S>
SeriesT<S> prepotential_series(const JobSpec& job);

// Exact rationals travel as [re_num, re_den, im_num, im_den]; entries beyond 64 bits become strings.
nlohmann::json exact_json(const GaussQ& q);
GaussQ exact_from_json(const nlohmann::json& j);

struct RunOptions {
    std::optional<int> order;
    std::optional<std::string> backend;
    std::optional<std::uint64_t> seed;
    bool skip_geometry = false;
    bool timings = false;
    bool corrupt = false;  // roundtrip test hook: perturbs the frame before extraction
    std::optional<std::vector<Eigen::VectorXd>> points;
};

struct Outcome {
    int code = kOk;
    nlohmann::json report;
};

Outcome cmd_validate(const std::string& text, const RunOptions& opt = {});
Outcome cmd_build(const std::string& text, const RunOptions& opt = {});
Outcome cmd_roundtrip(const std::string& text, const RunOptions& opt = {});
Outcome cmd_metric(const std::string& text, const RunOptions& opt = {});
// L = 0 for each dims entry: flat frame and g = I4 x eta at `points` chart points.
Outcome cmd_flat_test(const std::vector<Dims>& dims, int order, int points, std::uint64_t seed);

std::vector<Eigen::VectorXd> parse_points(const std::string& text);

}  // namespace hk::cli
