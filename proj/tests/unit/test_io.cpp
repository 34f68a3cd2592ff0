#include <gtest/gtest.h>

#include <filesystem>

#include "scem/errors.hpp"
#include "scem/inverse.hpp"
#include "scem/io.hpp"

using namespace scem;
namespace fs = std::filesystem;

TEST(Io, LayoutNamesAndRoundTrip) {
    EXPECT_EQ(io::load_layout("default12").size(), 12u);
    const auto layout = ElectrodeLayout::default16();
    const auto back = io::layout_from_json(io::to_json(layout));
    ASSERT_EQ(back.size(), 16u);
    for (std::size_t m = 0; m < 16; ++m) {
        EXPECT_EQ(back.arc(m).begin, layout.arc(m).begin);
        EXPECT_EQ(back.arc(m).end, layout.arc(m).end);
    }
    EXPECT_THROW(io::load_layout("no-such-layout.json"), ContractError);
}

TEST(Io, ProfileRoundTrip) {
    const auto layout = ElectrodeLayout::default8();
    for (ProfileKind kind : {ProfileKind::Box, ProfileKind::Hat}) {
        const auto p = make_profile(layout, kind, {1.5, 2, 3, 4, 5, 6, 7, 8.25});
        const auto q = io::profile_from_json(io::to_json(p));
        EXPECT_EQ(q.kind(), kind);
        for (double s : {0.3, 1.41, 2.2, 3.9}) EXPECT_EQ(q.eval(s), p.eval(s));
    }
    std::vector<std::vector<double>> knots, values;
    for (std::size_t m = 0; m < 8; ++m) {
        knots.push_back({layout.arc(m).begin, layout.arc(m).midpoint(), layout.arc(m).end});
        values.push_back({1.0, 3.0 + static_cast<double>(m), 0.5});
    }
    const auto c = make_custom_profile(layout, knots, values);
    const auto d = io::profile_from_json(io::to_json(c));
    for (double s : {0.3, 1.41, 2.2, 3.9}) EXPECT_EQ(d.eval(s), c.eval(s));
}

TEST(Io, FrameRoundTrip) {
    SynthesisConfig c;
    c.layout = ElectrodeLayout::default8();
    c.contacts = std::vector<double>(8, 10.0);
    c.fine_level = 3;
    c.relative_noise = 1e-3;
    c.seed = 5;
    const auto frame = synthesize_data(c);
    const auto dir = fs::temp_directory_path() / "scem_io_test";
    fs::create_directories(dir);
    io::write_json(dir / "frame.json", io::to_json(frame));
    const auto back = io::frame_from_json(io::read_json(dir / "frame.json"));
    // reading re-centres each pattern, which may move the last bit
    EXPECT_LT((back.voltages - frame.voltages).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(back.noise_std, frame.noise_std);
    EXPECT_EQ(back.seed, 5u);
    EXPECT_EQ(back.level, 3);
    EXPECT_EQ(back.pattern_count(), 7u);
    fs::remove_all(dir);
}

TEST(Io, FrameSizeMismatchRejected) {
    io::Json j = {{"patterns", {{1.0, -1.0}}}, {"voltages", {0.1, -0.1, 0.0}}};
    EXPECT_THROW(io::frame_from_json(j), ContractError);
    EXPECT_THROW(io::frame_from_json(io::Json{{"voltages", {1.0}}}), ContractError);
}

TEST(Io, PhantomRoundTrip) {
    Phantom p;
    p.background = 0.25;
    p.base_level = 6;
    p.inclusions.push_back({Inclusion::Shape::Disk, {0.35, 0.6}, 0.15, 0.0025});
    p.inclusions.push_back({Inclusion::Shape::Gaussian, {0.7, 0.2}, 0.1, 0.5});
    const auto q = io::phantom_from_json(io::to_json(p));
    EXPECT_EQ(q.base_level, 6);
    ASSERT_EQ(q.inclusions.size(), 2u);
    for (Point x : {Point{0.35, 0.6}, Point{0.7, 0.25}, Point{0.9, 0.9}}) EXPECT_EQ(q.value(x), p.value(x));
    EXPECT_THROW(io::phantom_from_json(io::Json{{"background", -1.0}}), ParameterError);
}

TEST(Io, PriorDefaults) {
    const auto p = io::prior_from_json(io::Json::object());
    EXPECT_EQ(p.mean, 0.25);
    EXPECT_EQ(p.correlation_length, kTankCorrelationLength);
    EXPECT_EQ(io::prior_from_json(io::to_json(io::PriorSpec{1.0, 2.0, 3.0})).std, 2.0);
}
