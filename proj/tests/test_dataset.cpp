#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "col/dataset.hpp"

using namespace col;
using namespace col::recsys;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("ingest parses the movielens dat format") {
    auto path = write_temp("ds_dat.dat", "1::10::5::0\n1::11::3::0\n2::10::4::0\n");
    auto ds = ingest(path, FileFormat::MovielensDat);
    CHECK(ds.size() == 3);
    CHECK(ds.user_ids().size() == 2);
    CHECK(ds.item_ids().size() == 2);
    CHECK(ds.r_min() == 3.0);
    CHECK(ds.r_max() == 5.0);
}

TEST_CASE("ingest parses csv with and without header") {
    auto with = write_temp("ds_hdr.csv", "user,item,rating\n1,10,5\n2,10,4\n");
    auto without = write_temp("ds_nohdr.csv", "1,10,5\n2,10,4\n");
    CHECK(ingest(with, FileFormat::Csv).size() == 2);
    CHECK(ingest(without, FileFormat::Csv).size() == 2);
}

TEST_CASE("ingest rejects an empty file") {
    auto path = write_temp("ds_empty.csv", "");
    CHECK_THROWS_AS(ingest(path, FileFormat::Csv), EmptyDatasetError);
}

TEST_CASE("ingest reports the offending line number") {
    auto path = write_temp("ds_bad.dat", "1::10::5::0\n1::xx::3::0\n");
    try {
        ingest(path, FileFormat::MovielensDat);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("ingest rejects wrong field counts") {
    auto path = write_temp("ds_short.csv", "1,10\n");
    CHECK_THROWS_AS(ingest(path, FileFormat::Csv), ParseError);
}

TEST_CASE("duplicate (user,item) pairs are rejected") {
    auto path = write_temp("ds_dup.csv", "1,10,5\n1,10,4\n");
    CHECK_THROWS_AS(ingest(path, FileFormat::Csv), ContractViolation);
}

TEST_CASE("constructor enforces value bounds") {
    std::vector<Rating> rs{{1, 10, 5.0}};
    CHECK_THROWS_AS(RatingDataset(rs, 1.0, 4.0), ContractViolation);
}

TEST_CASE("density is ratings over user-item grid size") {
    auto ds = RatingDataset::from_ratings({{1, 10, 1.0}, {1, 11, 2.0}, {2, 10, 3.0}});
    CHECK(ds.density() == doctest::Approx(3.0 / 4.0));
    CHECK(ds.rating_span() == doctest::Approx(2.0));
}

TEST_CASE("csv roundtrip preserves the dataset") {
    auto ds = RatingDataset::from_ratings({{1, 10, 1.25}, {2, 11, -0.5}});
    auto path = std::filesystem::temp_directory_path() / "ds_roundtrip.csv";
    write_csv(ds, path);
    auto back = ingest(path, FileFormat::Csv);
    CHECK(back.ratings() == ds.ratings());
}
