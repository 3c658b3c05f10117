#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hazscore/ingest.hpp"

namespace test {

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("hazscore_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
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

inline void write_file(const std::filesystem::path& p, const std::string& body) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << body;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline hazscore::LoanOrigination loan(std::string id, hazscore::Month orig = {2019, 1}, int fico = 720) {
    return {std::move(id), orig, fico, 35.0, 80.0, 250000.0, 4.5};
}

inline hazscore::LoanHistory history(std::string id, std::vector<std::uint8_t> status,
                                     hazscore::Month first = {2019, 2}) {
    hazscore::LoanHistory h;
    h.origination = loan(std::move(id), first - 1);
    h.first_month = first;
    h.status = std::move(status);
    return h;
}

}  // namespace test
