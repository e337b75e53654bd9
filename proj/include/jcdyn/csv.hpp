// csv.hpp — deterministic CSV emission: fixed %.12e float formatting,
// #-prefixed header comments, strict column-count checking.

#pragma once

#include <string>
#include <vector>

namespace jcdyn {

// One output file. Writes are buffered and flushed on close()/destruction;
// any stream failure surfaces as std::runtime_error naming the path.
class CsvFile {
public:
    explicit CsvFile(const std::string& path);
    ~CsvFile();
    CsvFile(const CsvFile&) = delete;
    CsvFile& operator=(const CsvFile&) = delete;

    void comment(const std::string& text);                 // "# text"
    void header(const std::vector<std::string>& columns);  // once, before rows
    void row(const std::vector<std::string>& cells);
    void close();

    // cell formatters
    static std::string num(double v);    // %.12e
    static std::string integer(long v);
    static std::string flag(bool b);     // "0" / "1"

private:
    std::string path_;
    std::string buf_;
    std::size_t ncols_ = 0;
    bool closed_ = false;
};

}  // namespace jcdyn
