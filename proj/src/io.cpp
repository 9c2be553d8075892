#include "cdxsem/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <zlib.h>

#include "cdxsem/errors.hpp"
#include "cdxsem/text.hpp"

namespace cdxsem::io {

namespace {
constexpr std::size_t kBufSize = 1 << 20;
}

LineReader::LineReader(const std::filesystem::path& path) : path_(path), buf_(kBufSize) {
    const std::string name = path.string();
    if (name.size() > 3 && name.compare(name.size() - 3, 3, ".gz") == 0) {
        gz_ = gzopen(name.c_str(), "rb");
        if (!gz_)
            throw DataError("cannot open " + name);
        gzbuffer(static_cast<gzFile>(gz_), kBufSize);
    } else {
        file_ = std::fopen(name.c_str(), "rb");
        if (!file_)
            throw DataError("cannot open " + name);
    }
}

LineReader::~LineReader() {
    if (gz_)
        gzclose(static_cast<gzFile>(gz_));
    if (file_)
        std::fclose(file_);
}

bool LineReader::fill() {
    pos_ = 0;
    if (gz_) {
        const int n = gzread(static_cast<gzFile>(gz_), buf_.data(), static_cast<unsigned>(buf_.size()));
        if (n < 0)
            throw DataError("gzip read error in " + path_.string());
        end_ = static_cast<std::size_t>(n);
    } else {
        end_ = std::fread(buf_.data(), 1, buf_.size(), file_);
        if (end_ == 0 && std::ferror(file_))
            throw DataError("read error in " + path_.string());
    }
    if (end_ == 0)
        eof_ = true;
    return end_ > 0;
}

bool LineReader::next(std::string_view& line) {
    pending_.clear();
    while (true) {
        if (pos_ >= end_) {
            if (eof_ || !fill()) {
                if (!pending_.empty()) {
                    if (pending_.back() == '\r')
                        pending_.pop_back();
                    line = pending_;
                    return true;
                }
                return false;
            }
        }
        const char* nl = static_cast<const char*>(std::memchr(buf_.data() + pos_, '\n', end_ - pos_));
        if (nl) {
            const std::size_t len = static_cast<std::size_t>(nl - (buf_.data() + pos_));
            if (pending_.empty()) {
                line = std::string_view(buf_.data() + pos_, len);
                if (!line.empty() && line.back() == '\r')
                    line.remove_suffix(1);
            } else {
                pending_.append(buf_.data() + pos_, len);
                if (!pending_.empty() && pending_.back() == '\r')
                    pending_.pop_back();
                line = pending_;
            }
            pos_ += len + 1;
            return true;
        }
        pending_.append(buf_.data() + pos_, end_ - pos_);
        pos_ = end_;
    }
}

void for_each_line(const std::vector<std::string>& inputs,
                   const std::function<void(std::string_view)>& fn) {
    for (const auto& input : inputs) {
        LineReader reader(input);
        std::string_view line;
        while (reader.next(line))
            fn(line);
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw DataError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw DataError("write failed: " + path.string());
}

std::string file_digest(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    char out[32];
    std::snprintf(out, sizeof(out), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(text::fnv1a64(bytes)));
    return out;
}

} // namespace cdxsem::io
