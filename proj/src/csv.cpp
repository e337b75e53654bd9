// csv.cpp — buffered deterministic CSV writing.

#include "jcdyn/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace jcdyn {

CsvFile::CsvFile(const std::string& path) : path_(path) {
    buf_.reserve(1 << 16);
}

CsvFile::~CsvFile() {
    try {
        close();
    } catch (...) {
        // destructor must not throw; an explicit close() reports failures
    }
}

void CsvFile::comment(const std::string& text) {
    if (closed_) throw std::runtime_error("csv: write after close: " + path_);
    buf_ += "# ";
    buf_ += text;
    buf_ += '\n';
}

void CsvFile::header(const std::vector<std::string>& columns) {
    if (closed_) throw std::runtime_error("csv: write after close: " + path_);
    if (ncols_ != 0) throw std::runtime_error("csv: duplicate header: " + path_);
    if (columns.empty()) throw std::runtime_error("csv: empty header: " + path_);
    ncols_ = columns.size();
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += columns[i];
    }
    buf_ += '\n';
}

void CsvFile::row(const std::vector<std::string>& cells) {
    if (closed_) throw std::runtime_error("csv: write after close: " + path_);
    if (ncols_ == 0) throw std::runtime_error("csv: row before header: " + path_);
    if (cells.size() != ncols_)
        throw std::runtime_error("csv: column count mismatch: " + path_);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += cells[i];
    }
    buf_ += '\n';
}

void CsvFile::close() {
    if (closed_) return;
    closed_ = true;
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("csv: cannot open " + path_);
    out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    out.flush();
    if (!out) throw std::runtime_error("csv: write failed: " + path_);
}

std::string CsvFile::num(double v) {
    char tmp[40];
    std::snprintf(tmp, sizeof(tmp), "%.12e", v);
    return tmp;
}

std::string CsvFile::integer(long v) {
    char tmp[24];
    std::snprintf(tmp, sizeof(tmp), "%ld", v);
    return tmp;
}

std::string CsvFile::flag(bool b) { return b ? "1" : "0"; }

}  // namespace jcdyn
