#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "normcite/corpus.hpp"

namespace normcite::testing {

inline std::filesystem::path fixture(const std::string& name)
{
    return std::filesystem::path(NORMCITE_FIXTURES) / name;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("normcite-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
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

inline void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline ArticleSet make_cell(const std::string& group, const std::string& field, int year,
                            std::vector<Count> counts)
{
    ArticleSet cell;
    cell.group = group;
    cell.key = {field, year};
    cell.counts = std::move(counts);
    return cell;
}

/// `total` articles of which the first `cited` have count `value`.
inline std::vector<Count> binary_counts(std::size_t total, std::size_t cited, Count value = 1)
{
    std::vector<Count> v(total, 0);
    std::fill(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(cited), value);
    return v;
}

}  // namespace normcite::testing
