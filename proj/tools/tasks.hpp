#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace cusp::cli {

inline constexpr const char* kVersion = "0.1.0";

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    nlohmann::ordered_json meta = nlohmann::ordered_json::array();  // one entry per row
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();
    bool accuracy_failure = false;
};

// Runs cfg.task; rows are computed on up to cfg.threads threads and stored
// in input order.
Table run_task(const RunConfig& cfg);

std::string to_csv(const Table& t);

// Default point pair with the dimensions of the model.
PointPair default_pair(const CuspModel& model);

}  // namespace cusp::cli
