#pragma once

#include <filesystem>
#include <random>
#include <string>

namespace testsupport {

inline std::filesystem::path source_dir() {
    return std::filesystem::path(CDXSEM_SOURCE_DIR);
}

inline std::filesystem::path fixture(const std::string& name) {
    return source_dir() / "tests" / "fixtures" / name;
}

inline std::filesystem::path golden(const std::string& name) {
    return source_dir() / "tests" / "golden" / name;
}

inline std::filesystem::path data(const std::string& name) {
    return source_dir() / "data" / name;
}

// Unique scratch directory, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() /
                ("cdxsem_test_" + tag + "_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

} // namespace testsupport
