#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctxengage/table_io.hpp"
#include "ctxengage/tsv.hpp"

using namespace ctxengage;
namespace fs = std::filesystem;

namespace {

// One row of each tweet type, covering every media token, with mixed
// engagement presence. Sets are pre-sorted so the byte-level round trip is
// exact.
const char* kFixture =
    "101 2435 102\tH01 H02\tT000001\tPhoto Photo Video\tL01\tD01\tTopLevel\tLANGA\t1581000000\tA01\t100\t50\t"
    "true\t1200000000\tV01\t10\t20\tfalse\t1300000000\ttrue\t\t\t\t1581000500\n"
    "101 99 102\t\tT000002\tGIF\t\t\tRetweet\tLANGB\t1581001000\tA02\t5\t2\tfalse\t1400000000\tV02\t1\t1\t"
    "false\t1500000000\tfalse\t1581001100\t\t\t\n"
    "101 7 102\tH03\tT000003\t\tL02 L03\tD02 D03\tQuote\tLANGA\t1581002000\tA01\t100\t50\ttrue\t1200000000\t"
    "V03\t8\t9\ttrue\t1250000000\ttrue\t\t1581002500\t1581002600\t1581002900\n"
    "101 1 102\tH01\tT000004\tVideo\t\t\tReply\tLANGC\t1581003000\tA03\t77\t33\tfalse\t1310000000\tV01\t10\t20\t"
    "false\t1300000000\ttrue\t\t\t\t\n";

fs::path temp_dir() {
    auto dir = fs::temp_directory_path() / ("ctxengage_ingest_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("optional engagement fields parse to absent or present cells") {
    auto t = parse_tsv_string(kFixture);
    REQUIRE(t.row_count() == 4);
    const auto& like = t.i64_data("like_timestamp");
    const auto& reply = t.i64_data("reply_timestamp");
    CHECK(like.is_present(0));
    CHECK(like.values[0] == 1581000500);
    CHECK_FALSE(reply.is_present(0));
    CHECK(reply.is_present(1));
    CHECK_FALSE(like.is_present(1));
    CHECK_FALSE(like.is_present(3));

    CHECK(t.sets("hashtags")[0] == std::vector<std::string>{"H01", "H02"});
    CHECK(t.sets("hashtags")[1].empty());
    CHECK(t.strings("present_media")[0] == "Photo Photo Video");
}

TEST_CASE("zero-byte input gives an empty table") {
    auto t = parse_tsv_string("");
    CHECK(t.row_count() == 0);
    CHECK(t.column_count() == 24);
}

TEST_CASE("fixture round-trips parse -> serialize -> parse byte-identically") {
    auto t = parse_tsv_string(kFixture);
    std::string serialized = serialize_tsv_string(t);
    CHECK(serialized == kFixture);
    auto t2 = parse_tsv_string(serialized);
    CHECK(t2 == t);
}

TEST_CASE("malformed rows carry line and field information") {
    CHECK_THROWS_AS(parse_tsv_string("a\tb\tc\n"), ParseError);
    try {
        parse_tsv_string("a\tb\tc\n");
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
    }

    // Unknown tweet type on line 1, field 6.
    std::string bad = kFixture;
    bad.replace(bad.find("TopLevel"), 8, "Toplevel");
    try {
        parse_tsv_string(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
        CHECK(e.field == 6);
    }

    std::string bad_media = kFixture;
    bad_media.replace(bad_media.find("GIF"), 3, "Gif");
    CHECK_THROWS_AS(parse_tsv_string(bad_media), ParseError);
}

TEST_CASE("write/read round trip preserves the table") {
    auto dir = temp_dir();
    auto t = parse_tsv_string(kFixture);
    DatasetId id{"train", "random", 10, "FE_"};
    write_table(t, id, dir);
    CHECK(stage_exists(id, dir));
    auto back = read_table(id, dir);
    CHECK(back == t);
    fs::remove_all(dir);
}

TEST_CASE("name collisions need the overwrite flag") {
    auto dir = temp_dir();
    auto t = parse_tsv_string(kFixture);
    write_table(t, "x", dir);
    CHECK_THROWS(write_table(t, "x", dir));
    write_table(t, "x", dir, true);
    fs::remove_all(dir);
}

TEST_CASE("dataset ids render the documented names") {
    CHECK(DatasetId{"train", "EWU", 10, "Final_"}.render() == "Final_train_EWU_sample_10pct");
    CHECK(DatasetId{"val+test", "inter_EWU+EU", 1, "ChiSq_"}.render() ==
          "ChiSq_val+test_inter_EWU+EU_sample_1pct");
    CHECK(DatasetId{"train", "full", 100, "Final_"}.render() == "Final_train");
    CHECK_THROWS(validate_dataset_id(DatasetId{"train", "full", 10, ""}));
    CHECK_THROWS(validate_dataset_id(DatasetId{"train", "EWU", 3, ""}));
}

TEST_CASE("tampered schema header is a schema mismatch") {
    auto dir = temp_dir();
    auto t = parse_tsv_string(kFixture);
    write_table(t, "y", dir);
    {
        std::ofstream out(dir / "y.schema.tsv", std::ios::trunc);
        out << "garbage\n";
    }
    CHECK_THROWS(read_table("y", dir));
    fs::remove_all(dir);
}

TEST_CASE("a missing data file means the stage does not exist") {
    auto dir = temp_dir();
    auto t = parse_tsv_string(kFixture);
    write_table(t, "z", dir);
    CHECK(stage_exists("z", dir));
    fs::remove(dir / "z.data.tsv");
    CHECK_FALSE(stage_exists("z", dir));
    fs::remove_all(dir);
}

TEST_CASE("float cells survive write/read exactly") {
    Float64Data f = {0.1, 1.0 / 3.0, -2.5e-17, 12345.678901234567, 0.0};
    auto t = ColumnTable::from_columns({{"v", Column(f)}});
    auto dir = temp_dir();
    write_table(t, "floats", dir);
    auto back = read_table("floats", dir);
    CHECK(back == t);
    fs::remove_all(dir);
}
