#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypflats {

// 17 significant digits: enough to round-trip any double exactly.
inline std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Minimal CSV emitter; bodies carry no timestamps so identical configs
// produce bit-identical files.
class csv_writer {
  public:
    csv_writer(const std::string& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_)
            throw std::runtime_error("csv_writer: cannot open " + path);
        write_row(header);
    }

    void write_row(const std::vector<std::string>& fields) {
        for (std::size_t k = 0; k < fields.size(); ++k) {
            if (k)
                out_ << ',';
            out_ << fields[k];
        }
        out_ << '\n';
    }

    void close() { out_.close(); }

  private:
    std::ofstream out_;
};

inline void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_text_file: cannot open " + path);
    out << body;
}

} // namespace hypflats
