#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace normcite {

/// Reserved group label for the reference (world) set.
inline constexpr const char* kWorld = "WORLD";

using Count = std::uint64_t;

/// Raised for malformed input data: bad filenames, bad rows, broken corpus invariants.
class CorpusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One normalisation cell: a subject category crossed with a publication year.
struct FieldYearKey {
    std::string field;
    int year = 0;

    auto operator<=>(const FieldYearKey&) const = default;

    /// Throws CorpusError when the field is blank or the year is not four digits.
    void validate() const;
    std::string label() const;
};

/// Raw per-article counts for one (group, field, year) cell.
struct ArticleSet {
    std::string group;
    FieldYearKey key;
    std::vector<Count> counts;
    /// Either empty or parallel to counts.
    std::vector<std::string> ids;

    std::size_t size() const { return counts.size(); }
    bool is_world() const { return group == kWorld; }
    void validate() const;
};

struct CellId {
    std::string group;
    FieldYearKey key;

    auto operator<=>(const CellId&) const = default;
};

/// Every group and world cell of an evaluation. Immutable once built.
class Corpus {
public:
    Corpus() = default;

    /// Adds a cell; throws CorpusError on a duplicate (group, key).
    void add(ArticleSet cell);

    /// Throws CorpusError if a group cell has no WORLD cell with the same key.
    void validate() const;

    const std::map<CellId, ArticleSet>& cells() const { return cells_; }
    /// Group labels, WORLD excluded.
    const std::set<std::string>& groups() const { return groups_; }
    const std::set<FieldYearKey>& keys() const { return keys_; }

    bool contains(const std::string& group, const FieldYearKey& key) const;
    const ArticleSet& cell(const std::string& group, const FieldYearKey& key) const;
    const ArticleSet& world(const FieldYearKey& key) const { return cell(kWorld, key); }

    /// Keys for which the group has a cell, in key order.
    std::vector<FieldYearKey> keys_of(const std::string& group) const;
    /// Distinct years present for the group (or WORLD).
    std::set<int> years_of(const std::string& group) const;

private:
    std::map<CellId, ArticleSet> cells_;
    std::set<std::string> groups_;
    std::set<FieldYearKey> keys_;
};

struct SampleSpec {
    std::size_t size = 500;
    std::uint64_t seed = 0;
};

/// Small-cell exclusion heuristic used before equalising proportions.
struct ExclusionPolicy {
    std::size_t min_articles = 100;
    double min_fraction_of_mean = 0.25;

    void validate() const;
};

/// Parses `<group>__<field>__<year>.tsv`; throws CorpusError when the name does not match.
CellId parse_cell_filename(const std::string& filename);
std::string cell_filename(const std::string& group, const FieldYearKey& key);

/// Reads one cell file. Error messages carry the file name and line number.
ArticleSet read_cell(const std::filesystem::path& path);
void write_cell(const ArticleSet& cell, const std::filesystem::path& path);

/// Loads every `*.tsv` cell file in the directory; other files are ignored.
Corpus load_corpus(const std::filesystem::path& directory);
/// Writes one file per cell into the directory (created if missing).
void write_corpus(const Corpus& corpus, const std::filesystem::path& directory);

/// Uniform sample without replacement; the input is returned unchanged when
/// spec.size >= set.size(). Sampled articles keep their original order.
ArticleSet sample_cell(const ArticleSet& set, const SampleSpec& spec);

/// Samples every cell. Each cell's seed derives from `seed` and the cell
/// coordinates, so the result does not depend on iteration order. World cells
/// use `world_size` when given, otherwise `group_size`.
Corpus sample_corpus(const Corpus& corpus, std::size_t group_size,
                     std::optional<std::size_t> world_size, std::uint64_t seed);

/// Keys retained for `group`: cell size >= min_articles and >= min_fraction_of_mean
/// times the mean size of all the group's cells (mean taken before exclusion).
std::set<FieldYearKey> apply_exclusion(const Corpus& corpus, const std::string& group,
                                       const ExclusionPolicy& policy);

}  // namespace normcite
