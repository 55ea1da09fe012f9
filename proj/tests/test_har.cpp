#include "ngrc/error.hpp"
#include "ngrc/har.hpp"

#include "support/synthetic.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace ngrc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("ngrc_har_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_lines(const fs::path& file, const std::vector<std::string>& lines)
{
    fs::create_directories(file.parent_path());
    std::ofstream out(file);
    for (const auto& l : lines) out << l << '\n';
}

std::string row(double value, std::size_t count = 128)
{
    std::string s;
    for (std::size_t i = 0; i < count; ++i) {
        s += "  " + std::to_string(value);
    }
    return s;
}

// Two training windows, axis a of window w constant at (w + 1) * (a + 1) / 10.
void write_fixture(const fs::path& root, std::vector<std::string> labels = {"1", "4"})
{
    const char* axes[] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a) {
        write_lines(root / "train" / "Inertial Signals" / ("total_acc_" + std::string(axes[a]) + "_train.txt"),
                    {row(0.1 * (a + 1)), row(0.2 * (a + 1))});
    }
    write_lines(root / "train" / "y_train.txt", labels);
}

ErrorCode load_error(const fs::path& root)
{
    try {
        load_har_split(root, Split::Train);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a load error");
    return ErrorCode::Io;
}

} // namespace

TEST_CASE("loads a small fixture")
{
    TempDir dir;
    write_fixture(dir.path);
    const auto d = load_har_split(dir.path, Split::Train);
    REQUIRE(d.size() == 2);
    CHECK(d.labels() == std::vector<int>{1, 4});
    CHECK(d.windows[0].steps() == 128);
    CHECK(d.windows[0].samples(1, 5) == doctest::Approx(0.2));
    CHECK(d.windows[1].samples(2, 127) == doctest::Approx(0.6));
    CHECK(d.class_names.at(3) == "sitting");
}

TEST_CASE("loader errors")
{
    SUBCASE("missing file")
    {
        TempDir dir;
        CHECK(load_error(dir.path) == ErrorCode::MissingFile);
    }
    SUBCASE("row count mismatch")
    {
        TempDir dir;
        write_fixture(dir.path, {"1"});
        CHECK(load_error(dir.path) == ErrorCode::RowCountMismatch);
    }
    SUBCASE("bad label")
    {
        TempDir dir;
        write_fixture(dir.path, {"1", "7"});
        CHECK(load_error(dir.path) == ErrorCode::BadLabel);
    }
    SUBCASE("malformed row")
    {
        TempDir dir;
        write_fixture(dir.path);
        write_lines(dir.path / "train" / "Inertial Signals" / "total_acc_y_train.txt", {row(0.1), row(0.1, 127)});
        CHECK(load_error(dir.path) == ErrorCode::MalformedRow);
    }
    SUBCASE("non-numeric value")
    {
        TempDir dir;
        write_fixture(dir.path);
        write_lines(dir.path / "train" / "Inertial Signals" / "total_acc_z_train.txt",
                    {row(0.1), row(0.1, 127) + " abc"});
        CHECK(load_error(dir.path) == ErrorCode::MalformedRow);
    }
}

TEST_CASE("write and reload is exact")
{
    TempDir dir;
    auto d = testing::synthetic_har(12, 128, Split::Test, 99);
    write_har_split(dir.path, d);
    const auto back = load_har_split(dir.path, Split::Test);
    CHECK(back == d);
}

TEST_CASE("digest")
{
    Dataset d;
    for (int label : {1, 1, 6}) {
        Window w;
        w.label = label;
        w.samples = Eigen::Matrix3Xd::Constant(3, 128, 0.5);
        d.windows.push_back(w);
    }
    const auto digest = dataset_digest(d, {.include_magnitude = true});
    CHECK(digest.windows == 3);
    CHECK(digest.class_counts == std::vector<std::size_t>{2, 0, 0, 0, 0, 1});
    for (const auto& axis : digest.axes) {
        CHECK(axis.min == 0.5);
        CHECK(axis.max == 0.5);
        CHECK(axis.mean == doctest::Approx(0.5));
    }
    CHECK(digest.has_magnitude);
    CHECK(digest.magnitude.mean == doctest::Approx(std::sqrt(0.75)));
    CHECK_THROWS_AS(dataset_digest(Dataset{}), Error);
}
