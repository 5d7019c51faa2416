#include "report.hpp"

#include <cmath>
#include <fstream>

#include "mfsmp/csv.hpp"

namespace mfsmp::cli {

void RunReport::add(std::string id, double estimate, double tolerance) {
    rows_.push_back({std::move(id), estimate, tolerance});
}

void RunReport::add_strictly_below(std::string id, double value, double bound) {
    add(std::move(id), value, std::nextafter(bound, -INFINITY));
}

void RunReport::note(std::string line) { notes_.push_back(std::move(line)); }

bool RunReport::all_pass() const {
    for (const CheckRow& r : rows_)
        if (!r.pass()) return false;
    return true;
}

void RunReport::write_csv(const std::filesystem::path& path) const {
    std::ofstream os(path);
    os << "check,estimate,tolerance,verdict\n";
    for (const CheckRow& r : rows_)
        os << r.id << ',' << format_double(r.estimate) << ',' << format_double(r.tolerance) << ','
           << (r.pass() ? "pass" : "fail") << '\n';
}

void RunReport::write_summary(const std::filesystem::path& path, const std::string& suite, unsigned long long seed,
                              const std::string& config_echo) const {
    std::ofstream os(path);
    std::size_t passed = 0;
    for (const CheckRow& r : rows_) passed += r.pass();
    os << kVersion << "\nsuite: " << suite << "\nseed: " << seed << "\nchecks: " << passed << '/' << rows_.size()
       << " pass\nverdict: " << (all_pass() ? "pass" : "fail") << "\n\n";
    for (const CheckRow& r : rows_)
        os << (r.pass() ? "pass  " : "FAIL  ") << r.id << "  " << format_double(r.estimate)
           << " <= " << format_double(r.tolerance) << '\n';
    if (!notes_.empty()) {
        os << '\n';
        for (const std::string& n : notes_) os << n << '\n';
    }
    os << "\n# configuration\n" << config_echo;
}

}  // namespace mfsmp::cli
