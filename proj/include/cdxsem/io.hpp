#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace cdxsem::io {

// Line-oriented reader over plain or gzip-compressed files (".gz" suffix).
// Lines are returned without the trailing newline; a trailing '\r' is stripped.
class LineReader {
  public:
    explicit LineReader(const std::filesystem::path& path);
    ~LineReader();

    LineReader(const LineReader&) = delete;
    LineReader& operator=(const LineReader&) = delete;

    // Returns false at end of input. The view stays valid until the next call.
    bool next(std::string_view& line);

    const std::filesystem::path& path() const { return path_; }

  private:
    bool fill();

    std::filesystem::path path_;
    void* gz_ = nullptr; // gzFile when compressed
    std::FILE* file_ = nullptr;
    std::vector<char> buf_;
    std::size_t pos_ = 0;
    std::size_t end_ = 0;
    bool eof_ = false;
    std::string pending_; // carries a line split across buffer refills
};

// Reads every line of every input in order.
void for_each_line(const std::vector<std::string>& inputs,
                   const std::function<void(std::string_view)>& fn);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// FNV-1a over the raw file bytes, rendered as "fnv1a64:<hex>".
std::string file_digest(const std::filesystem::path& path);

} // namespace cdxsem::io
