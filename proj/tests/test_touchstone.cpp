#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "lcsense/touchstone.hpp"
#include "malformed_corpus.hpp"

using namespace lcsense;
using namespace lcsense::touchstone;
using Complex = std::complex<double>;

namespace {

double rel_err(Complex a, Complex b) {
    return std::abs(a - b) / std::max(1e-300, std::abs(b));
}

}  // namespace

TEST_CASE("minimal RI file") {
    const auto doc = parse("# HZ S RI R 50\n1e6 0.5 0.0\n2e6 0.4 -0.1\n");
    CHECK(doc.ports == 1);
    CHECK(doc.points() == 2);
    CHECK(doc.frequencies_hz[0] == 1e6);
    CHECK(doc.frequencies_hz[1] == 2e6);
    CHECK(doc.value(0, 0) == Complex{0.5, 0.0});
    CHECK(doc.value(1, 0) == Complex{0.4, -0.1});
    CHECK(doc.option_line.reference_resistance == 50.0);
}

TEST_CASE("0 dB magnitude identity") {
    const auto doc = parse("# MHZ S DB R 50\n1 0 0\n2 0 0\n");
    CHECK(doc.frequencies_hz[0] == 1e6);
    CHECK(doc.value(0, 0) == Complex{1.0, 0.0});
    CHECK(doc.value(1, 0) == Complex{1.0, 0.0});
}

TEST_CASE("MA to complex conversion") {
    const auto doc = parse("# MHZ S MA R 50\n10 1.0 90\n20 1.0 90\n");
    CHECK(std::abs(doc.value(0, 0) - Complex{0.0, 1.0}) < 1e-12);
    CHECK(std::abs(doc.value(1, 0) - Complex{0.0, 1.0}) < 1e-12);
}

TEST_CASE("missing option line uses full defaults when data parses") {
    const auto doc = parse("0.001 0.5 10\n0.002 0.5 10\n");
    CHECK(doc.option_line.frequency_unit == FrequencyUnit::ghz);
    CHECK(doc.option_line.format == Format::ma);
    CHECK(doc.option_line.parameter == Parameter::s);
    CHECK(doc.option_line.reference_resistance == 50.0);
    CHECK(doc.frequencies_hz[0] == doctest::Approx(1e6));
}

TEST_CASE("partial option line fills remaining defaults") {
    const auto doc = parse("# MHZ\n1 0.5 10\n2 0.5 10\n");
    CHECK(doc.option_line.frequency_unit == FrequencyUnit::mhz);
    CHECK(doc.option_line.format == Format::ma);
    CHECK(doc.frequencies_hz[0] == 1e6);
}

TEST_CASE("option line tokens are case-insensitive and order-free") {
    const auto doc = parse("# r 75 ri z khz\n1 2.0 0.5\n2 2.0 0.5\n");
    CHECK(doc.option_line.frequency_unit == FrequencyUnit::khz);
    CHECK(doc.option_line.parameter == Parameter::z);
    CHECK(doc.option_line.format == Format::ri);
    CHECK(doc.option_line.reference_resistance == 75.0);
}

TEST_CASE("unit scaling yields identical Hz grids") {
    const auto hz = parse("# HZ S RI R 50\n1e6 0.5 0\n2e6 0.5 0\n");
    const auto khz = parse("# KHZ S RI R 50\n1e3 0.5 0\n2e3 0.5 0\n");
    const auto mhz = parse("# MHZ S RI R 50\n1 0.5 0\n2 0.5 0\n");
    const auto ghz = parse("# GHZ S RI R 50\n1e-3 0.5 0\n2e-3 0.5 0\n");
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(hz.frequencies_hz[i] == khz.frequencies_hz[i]);
        CHECK(hz.frequencies_hz[i] == mhz.frequencies_hz[i]);
        CHECK(hz.frequencies_hz[i] == ghz.frequencies_hz[i]);
    }
}

TEST_CASE("comments are preserved in order") {
    const auto doc = parse("!first\n# HZ S RI R 50\n!second\n1e6 0.5 0.0 !trailing\n2e6 1 0\n");
    REQUIRE(doc.comments.size() == 3);
    CHECK(doc.comments[0] == "first");
    CHECK(doc.comments[1] == "second");
    CHECK(doc.comments[2] == "trailing");
    CHECK(doc.points() == 2);
}

TEST_CASE("two-port continuation rows are accepted on read") {
    const auto split = parse("# HZ S RI R 50\n1e6 1 0 2 0\n3 0 4 0\n2e6 1 0 2 0 3 0 4 0\n");
    CHECK(split.ports == 2);
    CHECK(split.points() == 2);
    CHECK(split.value(0, 1) == Complex{2.0, 0.0});  // s21 column
    CHECK(split.value(0, 3) == Complex{4.0, 0.0});  // s22 column

    // ... and never produced on write.
    const std::string text = write(split, Format::ri);
    std::size_t data_lines = 0;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty() && line[0] != '!' && line[0] != '#') ++data_lines;
    }
    CHECK(data_lines == 2);
}

TEST_CASE("writer output is bit-stable") {
    TouchstoneDocument doc;
    doc.option_line = {FrequencyUnit::mhz, Parameter::s, Format::ri, 50.0};
    doc.comments = {"made by hand"};
    doc.ports = 1;
    doc.frequencies_hz = {1e6, 2e6};
    doc.values = {{0.5, 0.0}, {0.25, -0.125}};
    const std::string expected =
        "!made by hand\n"
        "# MHZ S RI R 50\n"
        "1.00000000000E+00 5.00000000000E-01 0.00000000000E+00\n"
        "2.00000000000E+00 2.50000000000E-01 -1.25000000000E-01\n";
    CHECK(write(doc, Format::ri) == expected);
}

TEST_CASE("two-port disk column order is 11, 21, 12, 22") {
    const auto grid = rfnet::FrequencyGrid({1e6, 2e6});
    rfnet::TwoPortSweep sweep{grid, {}, 50.0, {}};
    sweep.s = {
        {{0.1, 0.0}, {0.3, 0.0}, {0.2, 0.0}, {0.4, 0.0}},  // s12 != s21
        {{0.1, 0.0}, {0.3, 0.0}, {0.2, 0.0}, {0.4, 0.0}},
    };
    const auto doc = from_two_port_sweep(sweep, FrequencyUnit::hz);
    const std::string text = write(doc, Format::ri);
    std::istringstream ss(text);
    std::string line;
    std::getline(ss, line);  // option line
    std::getline(ss, line);  // first data row
    std::istringstream row(line);
    double f, s11r, s11i, s21r, s21i, s12r, s12i, s22r, s22i;
    row >> f >> s11r >> s11i >> s21r >> s21i >> s12r >> s12i >> s22r >> s22i;
    CHECK(s11r == 0.1);
    CHECK(s21r == 0.2);
    CHECK(s12r == 0.3);
    CHECK(s22r == 0.4);
}

TEST_CASE("parse-write round-trip across formats and units") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> mag(1e-3, 10.0);
    std::uniform_real_distribution<double> phase(-3.1, 3.1);
    const Format formats[] = {Format::ri, Format::ma, Format::db};
    const FrequencyUnit units[] = {FrequencyUnit::hz, FrequencyUnit::khz, FrequencyUnit::mhz,
                                   FrequencyUnit::ghz};
    for (std::size_t ports : {std::size_t{1}, std::size_t{2}}) {
        for (const auto unit : units) {
            TouchstoneDocument doc;
            doc.option_line = {unit, Parameter::s, Format::ri, 50.0};
            doc.ports = ports;
            for (int p = 0; p < 8; ++p) {
                doc.frequencies_hz.push_back(1e6 * (p + 1));
                for (std::size_t c = 0; c < ports * ports; ++c) {
                    doc.values.push_back(std::polar(mag(rng), phase(rng)));
                }
            }
            for (const auto format : formats) {
                const auto back = parse(write(doc, format));
                REQUIRE(back.points() == doc.points());
                REQUIRE(back.ports == doc.ports);
                for (std::size_t p = 0; p < doc.points(); ++p) {
                    CHECK(std::abs(back.frequencies_hz[p] - doc.frequencies_hz[p]) <=
                          1e-9 * doc.frequencies_hz[p]);
                    for (std::size_t c = 0; c < ports * ports; ++c) {
                        CHECK(rel_err(back.value(p, c), doc.value(p, c)) < 1e-9);
                    }
                }
            }
        }
    }
}

TEST_CASE("Z and Y parameter files normalize by the reference resistance") {
    // v1 stores Z/R: z_disk = 2 at R = 50 means Z = 100 ohm.
    const auto zdoc = parse("# HZ Z RI R 50\n1e6 2.0 -1.0\n2e6 2.0 -1.0\n");
    const auto zsweep = to_one_port_sweep(zdoc);
    CHECK(std::abs(zsweep.impedance()[0] - Complex{100.0, -50.0}) < 1e-12);

    // v1 stores Y*R: y_disk = 0.5 at R = 50 means Y = 0.01 S, Z = 100 ohm.
    const auto ydoc = parse("# HZ Y RI R 50\n1e6 0.5 0.0\n2e6 0.5 0.0\n");
    const auto ysweep = to_one_port_sweep(ydoc);
    CHECK(std::abs(ysweep.impedance()[0] - Complex{100.0, 0.0}) < 1e-12);

    const auto sdoc = parse("# HZ S RI R 50\n1e6 0.0 0.0\n2e6 0.0 0.0\n");
    CHECK(std::abs(to_one_port_sweep(sdoc).impedance()[0] - Complex{50.0, 0.0}) < 1e-12);
}

TEST_CASE("two-port Z documents convert through the impedance domain") {
    // T-network with Za = Zb = 25, Zc = 50 at R = 50: on disk Z/R, order 11,21,12,22.
    const auto doc = parse(
        "# HZ Z RI R 50\n"
        "1e6 1.5 0 1.0 0 1.0 0 1.5 0\n"
        "2e6 1.5 0 1.0 0 1.0 0 1.5 0\n");
    const auto sweep = to_two_port_sweep(doc);
    // ABCD closed form: s21 = 2/(A + B/z0 + C*z0 + D) with A = D = 1.5,
    // B = 62.5, C = 0.02 -> s21 = 2/5.25.
    CHECK(std::abs(sweep.s[0].m21 - Complex{2.0 / 5.25, 0.0}) < 1e-12);
    CHECK(std::abs(sweep.s[0].m12 - sweep.s[0].m21) < 1e-15);

    // Singular Y matrix points are reported with their index.
    const auto ydoc = parse(
        "# HZ Y RI R 50\n"
        "1e6 0.5 0 0.1 0 0.1 0 0.5 0\n"
        "2e6 0.5 0 0.5 0 0.5 0 0.5 0\n");
    try {
        to_two_port_sweep(ydoc);
        FAIL("expected SingularConversionError");
    } catch (const SingularConversionError& e) {
        CHECK(e.point_index() == 1);
    }
}

TEST_CASE("malformed corpus yields documented errors with line numbers") {
    for (const auto& entry : lcsense::testing::malformed_touchstone_corpus()) {
        CAPTURE(entry.name);
        try {
            parse(entry.text);
            FAIL("expected a parse error for ", entry.name);
        } catch (const UnsupportedVersionError& e) {
            CHECK(entry.kind == lcsense::testing::MalformedKind::unsupported_version);
            CHECK(e.line() == entry.expected_line);
        } catch (const FormatError& e) {
            CHECK(entry.kind == lcsense::testing::MalformedKind::format);
            CHECK(e.line() == entry.expected_line);
        }
    }
}

TEST_CASE("random byte soup never escapes the format errors") {
    std::mt19937 rng(4242);
    const std::string charset = "0123456789.eE+-# !SZYRIMADBhzkmg[]\n\t\r";
    std::uniform_int_distribution<std::size_t> pick(0, charset.size() - 1);
    std::uniform_int_distribution<int> len(0, 200);
    for (int trial = 0; trial < 2000; ++trial) {
        std::string text;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) text += charset[pick(rng)];
        try {
            const auto doc = parse(text);
            CHECK(doc.points() > 0);  // anything accepted must be a coherent document
        } catch (const FormatError&) {
        } catch (const SingularConversionError&) {
        }
    }
}
