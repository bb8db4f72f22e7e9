#include <gtest/gtest.h>

#include <filesystem>
#include <numbers>
#include <sstream>

#include "sectorlab/commands.hpp"
#include "sectorlab/config.hpp"
#include "sectorlab/io.hpp"
#include "sectorlab/manifest.hpp"
#include "sectorlab/svg.hpp"

using namespace sectorlab;
namespace fs = std::filesystem;

namespace {
constexpr double pi = std::numbers::pi;

class TempDir {
public:
    TempDir() {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        path_ = fs::temp_directory_path() / (std::string("sectorlab_") + info->test_suite_name() + "_" + info->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string sub(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

RunConfig small(const std::string& out, const std::string& extra = "") {
    return RunConfig::from_text("domain.n_r=16\ndomain.n_theta=16\noutput.dir=" + out + "\n" + extra);
}
}  // namespace

TEST(Numbers, ShortestRoundTrip) {
    for (double v : {0.0, -0.0, 1.0, 0.1, pi, 1e-300, -2.5e17, 5.520078110286311}) {
        EXPECT_EQ(parse_double(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_THROW(parse_double("1.5x"), FormatError);
    EXPECT_THROW(parse_double(""), FormatError);
}

TEST(Numbers, Expressions) {
    EXPECT_DOUBLE_EQ(parse_number("pi/2"), pi / 2);
    EXPECT_DOUBLE_EQ(parse_number("2*pi/3"), 2 * pi / 3);
    EXPECT_DOUBLE_EQ(parse_number("-(1+2)*3"), -9.0);
    EXPECT_DOUBLE_EQ(parse_number(" 1e-3 + 2 "), 2.001);
    EXPECT_THROW(parse_number("pi*"), FormatError);
    EXPECT_THROW(parse_number("(1"), FormatError);
    EXPECT_THROW(parse_number("1/0"), FormatError);
    EXPECT_EQ(parse_eigen_ref("eigen:3"), 3u);
    EXPECT_FALSE(parse_eigen_ref("3.5").has_value());
    EXPECT_THROW(parse_eigen_ref("eigen:0"), FormatError);
    EXPECT_THROW(parse_eigen_ref("eigen:x"), FormatError);
}

TEST(Config, DefaultsOverridesAndUnknownKeys) {
    const RunConfig d;
    for (const auto& k : config_keys()) EXPECT_EQ(d.str(k.name), k.fallback);
    const RunConfig c = RunConfig::from_text("# comment\n domain.beta = pi/3  # trailing\n\ndomain.n_r=20\n");
    EXPECT_DOUBLE_EQ(c.number("domain.beta"), pi / 3);
    EXPECT_EQ(c.count("domain.n_r"), 20u);
    EXPECT_THROW(RunConfig::from_text("domain.bta=1\n"), FormatError);
    EXPECT_THROW(RunConfig::from_text("just text\n"), FormatError);
    RunConfig e;
    EXPECT_THROW(e.set("nope", "1"), FormatError);
    e.set("domain.n_r", "2.5");
    EXPECT_THROW(e.count("domain.n_r"), FormatError);
    e.set("output.svg", "maybe");
    EXPECT_THROW(e.flag("output.svg"), FormatError);
}

TEST(Config, CanonicalTextIgnoresTheOutputDirectory) {
    EXPECT_EQ(small("a").canonical_text(), small("b").canonical_text());
    EXPECT_NE(small("a").canonical_text(), small("a", "domain.beta=1\n").canonical_text());
    EXPECT_EQ(RunConfig::from_text(small("a").canonical_text()).canonical_text(), small("a").canonical_text());
}

TEST(FieldFile, RoundTripsBothGeometries) {
    const TensorGrid s = TensorGrid::sector(SectorDomain::make(0.25, 1.5, 2.0), 5, 7);
    const TensorGrid r = TensorGrid::rectangle(RectDomain::make(3.0, 0.5), 6, 4);
    for (const TensorGrid& g : {s, r}) {
        const auto u = ScalarField::from_function(g, [](double a, double b) { return std::sin(a * 7.1) / (1.0 + b); });
        const ScalarField v = read_field_text(write_field_text(u));
        EXPECT_TRUE(v.grid.same_shape(g));
        EXPECT_EQ(v.values, u.values);
        EXPECT_EQ(write_field_text(v), write_field_text(u));
    }
}

TEST(FieldFile, MalformedInputs) {
    EXPECT_THROW(read_field_text(""), FormatError);
    EXPECT_THROW(read_field_text("POLAR 3 3 0 1 1\n"), FormatError);
    EXPECT_THROW(read_field_text("SECTOR 3 3 0 1\n"), FormatError);
    EXPECT_THROW(read_field_text("SECTOR 3 x 0 1 1\n"), FormatError);
    std::string text = "SECTOR 3 3 0 1 1\n";
    for (int k = 0; k < 8; ++k) text += "1\n";
    EXPECT_THROW(read_field_text(text), FormatError);
    EXPECT_THROW(read_field_text(text + "abc\n"), FormatError);
    EXPECT_THROW(read_field_text(text + "nan\n"), FormatError);
    EXPECT_NO_THROW(read_field_text(text + "2\n"));
    EXPECT_THROW(read_field_text(text + "2\n3\n"), FormatError);
    EXPECT_THROW(read_field_file("/nonexistent/field"), FormatError);
}

TEST(KeyValuesAndCsv, RoundTrip) {
    KeyValues kv;
    kv.set("b", 1.5);
    kv.set("a", std::string("x y"));
    kv.set("c", true);
    kv.set("b", 2);
    EXPECT_EQ(kv.text(), "b=2\na=x y\nc=true\n");
    EXPECT_EQ(KeyValues::parse(kv.text()).text(), kv.text());
    EXPECT_THROW(kv.get("z"), FormatError);

    CsvTable t({"index", "eigenvalue", "residual"});
    t.add_row({"1", format_double(5.783), format_double(1e-12)});
    t.add_row({"2", format_double(26.37), format_double(3e-11)});
    const CsvTable back = CsvTable::parse(t.text());
    EXPECT_EQ(back.header(), t.header());
    EXPECT_EQ(back.rows(), t.rows());
    EXPECT_THROW(t.add_row({"1"}), DomainError);
    EXPECT_THROW(CsvTable::parse("a,b\n1\n"), FormatError);
}

TEST(Manifest, HashesAndSortedListing) {
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    TempDir tmp;
    ArtifactWriter w(tmp.sub("m"));
    w.write("z.txt", "zz");
    w.write("a/b.txt", "abc");
    w.write("z.txt", "z");
    const std::string m = w.finish();
    EXPECT_EQ(m, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad  3  a/b.txt\n" + sha256_hex("z") +
                     "  1  z.txt\n");
    EXPECT_EQ(read_file(tmp.sub("m/manifest.txt")), m);
    EXPECT_EQ(read_file(tmp.sub("m/a/b.txt")), "abc");
}

TEST(Svg, ColormapEndsAndStructure) {
    EXPECT_EQ(diverging_color(-1.0), "#2166ac");
    EXPECT_EQ(diverging_color(0.0), "#ffffff");
    EXPECT_EQ(diverging_color(1.0), "#b2182b");
    EXPECT_EQ(diverging_color(7.0), "#b2182b");
    const TensorGrid g = TensorGrid::sector(SectorDomain::make(0.0, 1.0, 1.0), 4, 5);
    const std::string svg = heatmap_svg({{"u", ScalarField(g, 1.0)}});
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    std::size_t cells = 0;
    for (std::size_t pos = 0; (pos = svg.find("<path", pos)) != std::string::npos; ++pos) ++cells;
    EXPECT_EQ(cells, g.size());
}

TEST(Commands, BesselAndCriticalAngle) {
    std::ostringstream out;
    EXPECT_EQ(cmd_bessel({0.0, 2.0}, 1, 2, out), 0);
    const CsvTable t = CsvTable::parse(out.str());
    ASSERT_EQ(t.rows().size(), 4u);
    EXPECT_NEAR(parse_double(t.rows()[1][2]), 5.5201, 5e-4);
    EXPECT_NEAR(parse_double(t.rows()[2][2]), 5.1356, 5e-4);
    std::ostringstream ca;
    EXPECT_EQ(cmd_critical_angle(std::nullopt, ca), 0);
    EXPECT_NEAR(parse_double(KeyValues::parse(ca.str()).get("beta")), 1.3629, 1e-3);
    std::ostringstream bad;
    EXPECT_THROW(cmd_critical_angle(1.0, bad), DomainError);
}

TEST(Commands, SpectrumWritesReadableArtifacts) {
    TempDir tmp;
    std::ostringstream log;
    const CommandResult r = cmd_spectrum(small(tmp.sub("s"), "spectrum.count=3\n"), std::nullopt, log);
    EXPECT_EQ(r.exit_code, 0);
    const CsvTable t = CsvTable::parse(read_file(tmp.sub("s/spectrum.csv")));
    EXPECT_EQ(t.header(), (std::vector<std::string>{"index", "eigenvalue", "residual"}));
    ASSERT_EQ(t.rows().size(), 3u);
    EXPECT_NEAR(parse_double(t.rows()[0][1]), 5.783, 0.1);
    const ScalarField v = read_field_file(tmp.sub("s/eigenvector_2.field"));
    EXPECT_EQ(v.grid.n_r(), 16u);
    const KeyValues m = KeyValues::parse(read_file(tmp.sub("s/morse.txt")));
    EXPECT_EQ(m.get("morse_index"), "0");
    const CsvTable modes = CsvTable::parse(read_file(tmp.sub("s/modes.csv")));
    EXPECT_EQ(modes.rows()[0][2], "radial");
    EXPECT_EQ(modes.rows()[1][2], "angular");
    EXPECT_EQ(read_file(tmp.sub("s/manifest.txt")), r.manifest);
    EXPECT_NE(r.manifest.find("config.txt"), std::string::npos);
}

TEST(Commands, SolveClassifyRescaleChain) {
    TempDir tmp;
    std::ostringstream log;
    const RunConfig solve = RunConfig::from_text("domain.beta=pi\ndomain.n_r=20\ndomain.n_theta=20\n"
                                                 "problem.kind=henon\nproblem.alpha=2\noutput.dir=" +
                                                 tmp.sub("solve") + "\n");
    const CommandResult s = cmd_solve(solve, log);
    EXPECT_EQ(s.exit_code, 0);
    const KeyValues meta = KeyValues::parse(read_file(tmp.sub("solve/solution.meta")));
    EXPECT_LE(parse_double(meta.get("residual_norm")), 1e-8);
    EXPECT_EQ(meta.get("solver"), "ground_state");
    EXPECT_EQ(meta.get("provenance"), "ground_state:" + config_hash(solve));

    RunConfig cl = solve;
    cl.set("output.dir", tmp.sub("classify"));
    cmd_classify(cl, tmp.sub("solve/solution.field"), log);
    const KeyValues rep = KeyValues::parse(read_file(tmp.sub("classify/classification.txt")));
    EXPECT_TRUE(rep.has("verdict"));
    EXPECT_TRUE(rep.has("utheta_equation_residual"));
    const CsvTable sweep = CsvTable::parse(read_file(tmp.sub("classify/alpha_sweep.csv")));
    EXPECT_EQ(sweep.rows().size(), 31u);
    EXPECT_TRUE(fs::exists(tmp.sub("classify/heatmap.svg")));

    RunConfig rs = solve;
    rs.set("output.dir", tmp.sub("rescale"));
    rs.set("rescale.alpha", "2");
    cmd_rescale(rs, tmp.sub("solve/solution.field"), log);
    const KeyValues rr = KeyValues::parse(read_file(tmp.sub("rescale/rescale.txt")));
    EXPECT_EQ(parse_double(rr.get("scale")), 2.0);
    EXPECT_EQ(read_field_file(tmp.sub("rescale/rescaled.field")).grid.n_r(), 20u);
}

TEST(Commands, NewtonFromEigenReference) {
    TempDir tmp;
    std::ostringstream log;
    const RunConfig c = small(tmp.sub("n"), "problem.lambda=eigen:2\nsolver.method=newton\nsolver.initial=eigen:2\n");
    EXPECT_EQ(cmd_solve(c, log).exit_code, 0);
    const KeyValues meta = KeyValues::parse(read_file(tmp.sub("n/solution.meta")));
    EXPECT_EQ(meta.get("morse_index"), "1");
    EXPECT_EQ(meta.get("zero_modes"), "1");
}

TEST(Commands, SplittingCheck) {
    TempDir tmp;
    std::ostringstream log;
    const CommandResult r = cmd_splitting(small(tmp.sub("sp"), "domain.n_theta=17\n"), std::nullopt, log);
    EXPECT_EQ(r.exit_code, 0);
    const KeyValues kv = KeyValues::parse(read_file(tmp.sub("sp/splitting.txt")));
    EXPECT_EQ(kv.get("holds"), "true");
    EXPECT_EQ(parse_double(kv.get("mismatch")), 0.0);
}

TEST(Commands, RerunsAreByteIdentical) {
    TempDir tmp;
    std::ostringstream log;
    const std::string extra = "domain.beta=pi\nproblem.kind=henon\nproblem.alpha=6\n";
    const CommandResult a = cmd_solve(small(tmp.sub("a"), extra), log);
    const CommandResult b = cmd_solve(small(tmp.sub("b"), extra), log);
    EXPECT_EQ(a.manifest, b.manifest);
    RunConfig ca = small(tmp.sub("ca"), extra);
    RunConfig cb = small(tmp.sub("cb"), extra);
    EXPECT_EQ(cmd_classify(ca, tmp.sub("a/solution.field"), log).manifest,
              cmd_classify(cb, tmp.sub("b/solution.field"), log).manifest);
}

TEST(Commands, Errors) {
    TempDir tmp;
    std::ostringstream log;
    write_file(tmp.sub("bad.field"), "SECTOR 3 3 0 1 1\n1\n");
    EXPECT_THROW(cmd_classify(small(tmp.sub("c")), tmp.sub("bad.field"), log), FormatError);
    EXPECT_THROW(cmd_solve(small(tmp.sub("d"), "solver.method=magic\n"), log), FormatError);
    EXPECT_THROW(cmd_solve(small(tmp.sub("d"), "problem.kind=cubic\n"), log), FormatError);
    EXPECT_THROW(cmd_spectrum(small(tmp.sub("d"), "spectrum.space=both\n"), std::nullopt, log), FormatError);
    write_file(tmp.sub("other.field"), write_field_text(ScalarField(TensorGrid::sector(SectorDomain::make(0, 1, 1), 5, 5))));
    EXPECT_THROW(cmd_spectrum(small(tmp.sub("d")), tmp.sub("other.field"), log), FormatError);
}
