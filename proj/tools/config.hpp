// Plain-text run configuration for the cusp command-line tool.
//
// Grammar: `# comment`, `[section]` headers and `key = value` lines.
//
//   [model]   n, k, r (trivial fibre dimension), basis, turns | angles
//   [policy]  M, V, N, t_max, tol
//   [task]    task, s, pair (repeatable), method, max_m, max_v, t,
//             radii, fit_window, poincare_N, threads
//
// Matrices are rows separated by ';' with entries separated by ',' or
// spaces.  `turns` gives holonomy angles as fractions of a turn, `angles`
// in radians; both are indexed [block][generator].  Complex numbers are
// written 2.2, 2.2+1i, 1.0-0.5i or 3i.  A point is `x : y... : z...` and a
// pair is two points separated by '/'.  Radii are a list or lo:hi:step.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cusp/geometry.hpp"
#include "cusp/resolvent.hpp"

namespace cusp::cli {

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what)
        : std::runtime_error(line > 0 ? "config:" + std::to_string(line) + ": " + what : "config: " + what),
          line_(line)
    {
    }
    int line() const { return line_; }

private:
    int line_;
};

struct ModelSpec {
    int n = 0, k = 0, r = 0;
    std::vector<Vec> basis;
    std::vector<Vec> angles;  // [block][generator]
    bool radians = false;

    CuspModel build() const;
};

struct PointPair {
    HPoint a, b;
};

struct RunConfig {
    std::string task;
    ModelSpec model;
    TruncationPolicy policy;
    std::vector<cplx> s_values;
    std::vector<PointPair> pairs;
    std::string method = "modes";  // resolvent task: modes | images
    int max_m = 4, max_v = 2;
    std::vector<double> t_values;
    std::vector<double> radii;
    double fit_lo = 10.0, fit_hi = 30.0;
    int poincare_N = 1000;
    int threads = 1;
};

const std::vector<std::string>& task_names();

// Parses and validates everything except task-specific requirements.
RunConfig parse_config(const std::string& text);

// Task-specific checks; throws ConfigError naming the missing field.
void validate_for_task(const RunConfig& cfg);

// Canonical text that parses back to the same RunConfig (doubles written
// with 17 significant digits).
std::string to_config_text(const RunConfig& cfg);

std::string format_double(double v);
std::string format_complex(cplx z);
cplx parse_complex(const std::string& text);

}  // namespace cusp::cli
