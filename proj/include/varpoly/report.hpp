#pragma once

#include <map>
#include <string>
#include <vector>

#include "varpoly/linalg.hpp"
#include "varpoly/oracle.hpp"

namespace varpoly {

// Deterministic key/value report: keys render sorted, floats as %.12e, so a
// report is byte-identical across runs with the same inputs and seed.
struct ReportDocument {
    std::map<std::string, std::string> entries;

    void put(const std::string& key, const std::string& value);
    void put(const std::string& key, const char* value);
    void put(const std::string& key, double value);
    void put(const std::string& key, int value);
    void put(const std::string& key, bool value);
    void put(const std::string& key, const Vec& value);
    void put(const std::string& key, const Mat& value);

    std::string render() const;  // "key = value" lines, sorted by key
};

// %.12e with infinities and NaN spelled out ("inf", "-inf", "nan").
std::string format_sci(double v);

// CSV of sampled quotient rows: header "t,w1..wN,value", floats %.12e.
std::string csv_of_rows(const std::vector<QuotientRow>& rows);

}  // namespace varpoly
