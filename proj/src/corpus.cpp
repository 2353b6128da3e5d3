#include "normcite/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <random>
#include <regex>
#include <sstream>

#include "normcite/seeding.hpp"

namespace normcite {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kHeader = "article_id\tcount";

std::string trim(std::string_view s)
{
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    auto b = std::find_if_not(s.begin(), s.end(), is_space);
    auto e = std::find_if_not(s.rbegin(), std::string_view::reverse_iterator(b), is_space).base();
    return std::string(b, e);
}

[[noreturn]] void fail_at(const fs::path& path, std::size_t line, const std::string& what)
{
    std::ostringstream msg;
    msg << path.filename().string() << ":" << line << ": " << what;
    throw CorpusError(msg.str());
}

}  // namespace

void FieldYearKey::validate() const
{
    if (trim(field).empty()) {
        throw CorpusError("field label is empty");
    }
    if (year < 1000 || year > 9999) {
        throw CorpusError("year " + std::to_string(year) + " is not a 4-digit year");
    }
}

std::string FieldYearKey::label() const
{
    return field + "/" + std::to_string(year);
}

void ArticleSet::validate() const
{
    key.validate();
    if (trim(group).empty()) {
        throw CorpusError("group label is empty");
    }
    if (counts.empty()) {
        throw CorpusError("cell " + group + " " + key.label() + " has no articles");
    }
    if (!ids.empty() && ids.size() != counts.size()) {
        throw CorpusError("cell " + group + " " + key.label() + ": ids and counts differ in length");
    }
}

// ---------------------------------------------------------------------------
//  Corpus
// ---------------------------------------------------------------------------

void Corpus::add(ArticleSet cell)
{
    cell.validate();
    CellId id{cell.group, cell.key};
    if (cells_.contains(id)) {
        throw CorpusError("duplicate cell " + cell.group + " " + cell.key.label());
    }
    if (!cell.is_world()) {
        groups_.insert(cell.group);
    }
    keys_.insert(cell.key);
    cells_.emplace(std::move(id), std::move(cell));
}

void Corpus::validate() const
{
    for (const auto& [id, cell] : cells_) {
        if (id.group != kWorld && !contains(kWorld, id.key)) {
            throw CorpusError("missing world cell for " + id.group + " " + id.key.label());
        }
    }
}

bool Corpus::contains(const std::string& group, const FieldYearKey& key) const
{
    return cells_.contains(CellId{group, key});
}

const ArticleSet& Corpus::cell(const std::string& group, const FieldYearKey& key) const
{
    auto it = cells_.find(CellId{group, key});
    if (it == cells_.end()) {
        throw CorpusError("no cell " + group + " " + key.label());
    }
    return it->second;
}

std::vector<FieldYearKey> Corpus::keys_of(const std::string& group) const
{
    std::vector<FieldYearKey> out;
    for (const auto& [id, cell] : cells_) {
        if (id.group == group) {
            out.push_back(id.key);
        }
    }
    return out;
}

std::set<int> Corpus::years_of(const std::string& group) const
{
    std::set<int> out;
    for (const auto& key : keys_of(group)) {
        out.insert(key.year);
    }
    return out;
}

// ---------------------------------------------------------------------------
//  Files
// ---------------------------------------------------------------------------

CellId parse_cell_filename(const std::string& filename)
{
    static const std::regex pattern(R"(^(.+?)__(.+)__([0-9]{4})\.tsv$)");
    std::smatch m;
    if (!std::regex_match(filename, m, pattern)) {
        throw CorpusError("malformed filename '" + filename +
                          "' (expected <group>__<field>__<year>.tsv)");
    }
    CellId id{m[1].str(), FieldYearKey{m[2].str(), std::stoi(m[3].str())}};
    if (id.key.field.find("__") != std::string::npos || trim(id.group).empty()) {
        throw CorpusError("malformed filename '" + filename + "'");
    }
    id.key.validate();
    return id;
}

std::string cell_filename(const std::string& group, const FieldYearKey& key)
{
    return group + "__" + key.field + "__" + std::to_string(key.year) + ".tsv";
}

ArticleSet read_cell(const fs::path& path)
{
    const CellId id = parse_cell_filename(path.filename().string());

    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CorpusError("cannot open " + path.string());
    }

    ArticleSet cell;
    cell.group = id.group;
    cell.key = id.key;
    bool any_id = false;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line_no == 1) {
            if (line.starts_with("\xEF\xBB\xBF")) {
                line.erase(0, 3);
            }
            if (line != kHeader) {
                fail_at(path, line_no, "expected header 'article_id<TAB>count'");
            }
            continue;
        }
        if (line.empty()) {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
            fail_at(path, line_no, "expected exactly two tab-separated columns");
        }
        std::string article = line.substr(0, tab);
        const std::string value = trim(std::string_view(line).substr(tab + 1));
        if (value.starts_with('-')) {
            fail_at(path, line_no, "negative count '" + value + "'");
        }
        Count count = 0;
        const auto* first = value.data();
        const auto* last = value.data() + value.size();
        auto [ptr, ec] = std::from_chars(first, last, count, 10);
        if (value.empty() || ec != std::errc() || ptr != last) {
            fail_at(path, line_no, "count '" + value + "' is not a non-negative integer");
        }
        any_id = any_id || !article.empty();
        cell.counts.push_back(count);
        cell.ids.push_back(std::move(article));
    }
    if (line_no == 0) {
        fail_at(path, 1, "missing header");
    }
    if (!any_id) {
        cell.ids.clear();
    }
    if (cell.counts.empty()) {
        fail_at(path, line_no, "cell has no articles");
    }
    return cell;
}

void write_cell(const ArticleSet& cell, const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << kHeader << '\n';
    for (std::size_t i = 0; i < cell.counts.size(); ++i) {
        if (!cell.ids.empty()) {
            out << cell.ids[i];
        }
        out << '\t' << cell.counts[i] << '\n';
    }
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

Corpus load_corpus(const fs::path& directory)
{
    if (!fs::is_directory(directory)) {
        throw CorpusError("not a directory: " + directory.string());
    }
    // Directory iteration order is unspecified; sort for stable error reporting.
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".tsv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    Corpus corpus;
    for (const auto& file : files) {
        corpus.add(read_cell(file));
    }
    corpus.validate();
    return corpus;
}

void write_corpus(const Corpus& corpus, const fs::path& directory)
{
    fs::create_directories(directory);
    for (const auto& [id, cell] : corpus.cells()) {
        write_cell(cell, directory / cell_filename(id.group, id.key));
    }
}

// ---------------------------------------------------------------------------
//  Sampling and exclusion
// ---------------------------------------------------------------------------

ArticleSet sample_cell(const ArticleSet& set, const SampleSpec& spec)
{
    if (spec.size == 0) {
        throw std::invalid_argument("sample size must be at least 1");
    }
    if (spec.size >= set.size()) {
        return set;
    }
    std::vector<std::size_t> all(set.size());
    std::iota(all.begin(), all.end(), 0);
    std::vector<std::size_t> picked;
    picked.reserve(spec.size);
    std::mt19937_64 rng(spec.seed);
    std::sample(all.begin(), all.end(), std::back_inserter(picked), spec.size, rng);

    ArticleSet out;
    out.group = set.group;
    out.key = set.key;
    out.counts.reserve(spec.size);
    for (auto i : picked) {
        out.counts.push_back(set.counts[i]);
        if (!set.ids.empty()) {
            out.ids.push_back(set.ids[i]);
        }
    }
    return out;
}

Corpus sample_corpus(const Corpus& corpus, std::size_t group_size,
                     std::optional<std::size_t> world_size, std::uint64_t seed)
{
    Corpus out;
    for (const auto& [id, cell] : corpus.cells()) {
        SampleSpec spec;
        spec.size = cell.is_world() && world_size ? *world_size : group_size;
        spec.seed = derive_seed(seed, {label_hash(id.group), label_hash(id.key.field),
                                       static_cast<std::uint64_t>(id.key.year)});
        out.add(sample_cell(cell, spec));
    }
    out.validate();
    return out;
}

void ExclusionPolicy::validate() const
{
    if (min_articles < 1) {
        throw std::invalid_argument("min_articles must be at least 1");
    }
    if (!(min_fraction_of_mean >= 0.0 && min_fraction_of_mean <= 1.0)) {
        throw std::invalid_argument("min_fraction_of_mean must lie in [0, 1]");
    }
}

std::set<FieldYearKey> apply_exclusion(const Corpus& corpus, const std::string& group,
                                       const ExclusionPolicy& policy)
{
    policy.validate();
    const auto keys = corpus.keys_of(group);
    if (keys.empty()) {
        throw CorpusError("unknown group '" + group + "'");
    }
    double total = 0.0;
    for (const auto& key : keys) {
        total += static_cast<double>(corpus.cell(group, key).size());
    }
    const double floor = policy.min_fraction_of_mean * total / static_cast<double>(keys.size());

    std::set<FieldYearKey> kept;
    for (const auto& key : keys) {
        const auto n = corpus.cell(group, key).size();
        if (n >= policy.min_articles && static_cast<double>(n) >= floor) {
            kept.insert(key);
        }
    }
    return kept;
}

}  // namespace normcite
