#include "col/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <unordered_set>

namespace col::recsys {

namespace {

// (user,item) pair key for duplicate detection
std::uint64_t pair_key(std::int64_t u, std::int64_t i) {
    return (static_cast<std::uint64_t>(u) << 32) ^ static_cast<std::uint64_t>(i & 0xffffffff);
}

std::int64_t parse_int(std::string_view tok, std::size_t lineno, const char* what) {
    std::int64_t v{};
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError("line " + std::to_string(lineno) + ": bad " + what + " '" + std::string(tok) + "'");
    return v;
}

double parse_real(std::string_view tok, std::size_t lineno, const char* what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(std::string(tok), &pos);
        if (pos != tok.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(lineno) + ": bad " + what + " '" + std::string(tok) + "'");
    }
}

}  // namespace

RatingDataset::RatingDataset(std::vector<Rating> ratings, double r_min, double r_max)
    : ratings_(std::move(ratings)), r_min_(r_min), r_max_(r_max) {
    rebuild_ids_and_check();
}

RatingDataset RatingDataset::from_ratings(std::vector<Rating> ratings) {
    if (ratings.empty()) throw EmptyDatasetError("dataset has no ratings");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& r : ratings) {
        lo = std::min(lo, r.value);
        hi = std::max(hi, r.value);
    }
    return RatingDataset(std::move(ratings), lo, hi);
}

void RatingDataset::rebuild_ids_and_check() {
    users_.clear();
    items_.clear();
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(ratings_.size());
    for (const auto& r : ratings_) {
        if (r.value < r_min_ || r.value > r_max_)
            throw ContractViolation("rating value outside [r_min, r_max]");
        if (!seen.insert(pair_key(r.user, r.item)).second)
            throw ContractViolation("duplicate (user,item) pair: " + std::to_string(r.user) + "," +
                                    std::to_string(r.item));
        users_.insert(r.user);
        items_.insert(r.item);
    }
}

double RatingDataset::density() const {
    if (users_.empty() || items_.empty()) return 0.0;
    return static_cast<double>(ratings_.size()) /
           (static_cast<double>(users_.size()) * static_cast<double>(items_.size()));
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line, std::string_view sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t next = line.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + sep.size();
    }
    return out;
}

}  // namespace

RatingDataset ingest(const std::filesystem::path& path, FileFormat format) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());

    std::vector<Rating> ratings;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (format == FileFormat::Csv && !header_seen) {
            header_seen = true;
            if (line.rfind("user", 0) == 0) continue;  // optional header
        }
        const auto sep = format == FileFormat::MovielensDat ? std::string_view("::") : std::string_view(",");
        auto f = split_fields(line, sep);
        const std::size_t want = format == FileFormat::MovielensDat ? 4 : 3;
        if (f.size() != want)
            throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(want) +
                             " fields, got " + std::to_string(f.size()));
        Rating r;
        r.user = parse_int(f[0], lineno, "user id");
        r.item = parse_int(f[1], lineno, "item id");
        r.value = parse_real(f[2], lineno, "rating");
        ratings.push_back(r);
    }
    if (ratings.empty()) throw EmptyDatasetError("no ratings in " + path.string());
    return RatingDataset::from_ratings(std::move(ratings));
}

void write_csv(const RatingDataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "user,item,rating\n";
    out.precision(17);
    for (const auto& r : ds.ratings()) out << r.user << ',' << r.item << ',' << r.value << '\n';
}

}  // namespace col::recsys
