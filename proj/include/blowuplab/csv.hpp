#pragma once

#include <string>
#include <vector>

namespace blowuplab::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const; // -1 if absent
};

Table read(const std::string& path);

/// Shortest round-trip formatting (%.17g style); stable across reruns.
std::string format(double x);

std::string to_string(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

/// Write-to-temp then atomic rename; no partial files on error.
void write_file_atomic(const std::string& path, const std::string& body);

} // namespace blowuplab::csv
