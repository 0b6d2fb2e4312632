#include "varpoly/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace varpoly {

std::string format_sci(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

void ReportDocument::put(const std::string& key, const std::string& value) {
    entries[key] = value;
}

void ReportDocument::put(const std::string& key, const char* value) {
    entries[key] = value;
}

void ReportDocument::put(const std::string& key, double value) {
    entries[key] = format_sci(value);
}

void ReportDocument::put(const std::string& key, int value) {
    entries[key] = std::to_string(value);
}

void ReportDocument::put(const std::string& key, bool value) {
    entries[key] = value ? "true" : "false";
}

void ReportDocument::put(const std::string& key, const Vec& value) {
    std::string s = "[";
    for (int i = 0; i < value.size(); ++i) {
        if (i) s += ", ";
        s += format_sci(value[i]);
    }
    s += "]";
    entries[key] = s;
}

void ReportDocument::put(const std::string& key, const Mat& value) {
    std::string s = "[";
    for (int r = 0; r < value.rows(); ++r) {
        if (r) s += "; ";
        for (int c = 0; c < value.cols(); ++c) {
            if (c) s += ", ";
            s += format_sci(value(r, c));
        }
    }
    s += "]";
    entries[key] = s;
}

std::string ReportDocument::render() const {
    std::ostringstream os;
    for (const auto& [key, value] : entries) os << key << " = " << value << "\n";
    return os.str();
}

std::string csv_of_rows(const std::vector<QuotientRow>& rows) {
    std::ostringstream os;
    if (rows.empty()) return "t,value\n";
    const int n = static_cast<int>(rows.front().w_prime.size());
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",w" << i;
    os << ",value\n";
    for (const QuotientRow& row : rows) {
        os << format_sci(row.t);
        for (int i = 0; i < n; ++i) os << ',' << format_sci(row.w_prime[i]);
        os << ',' << format_sci(row.value) << "\n";
    }
    return os.str();
}

}  // namespace varpoly
