#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <unistd.h>
#include <string>

#include "lexcourt/corpus.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("lexcourt_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
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

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// In-memory collection; query_order follows the qrels keys.
inline lexcourt::Collection make_collection(const std::map<std::string, std::string>& texts,
                                            const lexcourt::Qrels& qrels = {}) {
    lexcourt::Collection c;
    for (const auto& [id, text] : texts) c.cases.emplace(id, lexcourt::make_case(id, text));
    c.qrels = qrels;
    for (const auto& [q, rel] : qrels) {
        c.query_order.push_back(q);
        c.cases.at(q).is_query = true;
    }
    return c;
}

}  // namespace testing
