#include "courtfda/error.hpp"
#include "courtfda/heatmap.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

using namespace courtfda;
using namespace courtfda::heatmap;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("zero field stays zero") {
    const std::vector<double> zero(12, 0.0);
    CHECK(rescale(zero, Scaling::Symmetric) == zero);
    CHECK(rescale(std::vector<double>(12, 3.0), Scaling::MinMax) == zero);
}

TEST_CASE("max 4, min -2 maps to 1 and -0.5, levels 255 and 64") {
    const GridSpec grid{3, 2};
    const std::vector<double> v{4.0, 1.0, 0.0, -2.0, 2.0, -1.0};
    const auto h = make_heatmap("phi1_missed", v, grid, Scaling::Symmetric);
    CHECK(*std::max_element(h.values.begin(), h.values.end()) == 1.0);
    CHECK(*std::min_element(h.values.begin(), h.values.end()) == -0.5);
    CHECK(gray_level(1.0, Scaling::Symmetric) == 255);
    CHECK(gray_level(-0.5, Scaling::Symmetric) == 64);
    CHECK(gray_level(0.0, Scaling::Symmetric) == 128);
    CHECK(gray_level(-1.0, Scaling::Symmetric) == 0);

    std::ostringstream pgm;
    write_pgm(pgm, h);
    const std::string header = "P5\n3 2\n255\n";
    const std::string bytes = pgm.str();
    REQUIRE(bytes.size() == header.size() + 6);
    CHECK(bytes.substr(0, header.size()) == header);
    // Top image row is grid row j = 1: values -2, 2, -1 -> -0.5, 0.5, -0.25.
    const auto* px = reinterpret_cast<const unsigned char*>(bytes.data() + header.size());
    CHECK(px[0] == 64);
    CHECK(px[1] == 191);
    CHECK(px[2] == 96);
    CHECK(px[3] == 255);
}

TEST_CASE("positive rescaling keeps the argmax") {
    const std::vector<double> v{0.3, -0.1, 2.5, 1.1, -2.0, 0.0};
    const auto s = rescale(v, Scaling::Symmetric);
    CHECK(std::max_element(s.begin(), s.end()) - s.begin() == std::max_element(v.begin(), v.end()) - v.begin());
    double peak = 0.0;
    for (double x : s) peak = std::max(peak, std::abs(x));
    CHECK(peak == 1.0);
    const auto m = rescale(v, Scaling::MinMax);
    CHECK(*std::min_element(m.begin(), m.end()) == 0.0);
    CHECK(*std::max_element(m.begin(), m.end()) == 1.0);
    CHECK(std::max_element(m.begin(), m.end()) - m.begin() == 2);
}

TEST_CASE("non-finite values are refused") {
    std::vector<double> v{1.0, std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(rescale(v, Scaling::Symmetric), ExportError);
    v[1] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(rescale(v, Scaling::MinMax), ExportError);
}

TEST_CASE("export writes CSV and PGM") {
    const auto dir = testutil::scratch("heatmap");
    const GridSpec grid{3, 2};
    const std::vector<double> v{4.0, 1.0, 0.0, -2.0, 2.0, -1.0};
    const auto files = export_heatmap(v, grid, (dir / "sub" / "phi1_made").string());
    REQUIRE(files.size() == 2);
    CHECK(slurp(files[0]) == "x,y,value\n0,0,1\n0.5,0,0.25\n1,0,0\n0,1,-0.5\n0.5,1,0.5\n1,1,-0.25\n");
    CHECK(slurp(files[1]).substr(0, 11) == "P5\n3 2\n255\n");

    // A directory in place of the file cannot be written.
    std::filesystem::create_directories(dir / "blocked.csv");
    CHECK_THROWS_AS(export_heatmap(v, grid, (dir / "blocked").string()), ExportError);
}

TEST_CASE("shortest round-trip formatting") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5, 123456789.125, 0.0}) {
        const auto s = format_double(x);
        CHECK(std::stod(s) == x);
    }
    CHECK(format_double(0.5) == "0.5");
}
