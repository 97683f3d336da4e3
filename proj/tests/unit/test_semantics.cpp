#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "ssvc/error.hpp"
#include "ssvc/semantics.hpp"

using namespace ssvc;
using namespace ssvc::semantics;

TEST_CASE("peaks: examples") {
  Heatmap hm(10, 10, 2, 0.0);
  hm.at(5, 7, 0) = 1.0;
  const auto p = extract_peaks(hm, 0.5, 10);
  REQUIRE(p.size() == 1);
  CHECK(p[0] == Peak{7, 5, 0, 1.0});

  Heatmap adj(6, 6, 1, 0.0);
  adj.at(2, 2, 0) = 0.9;
  adj.at(2, 3, 0) = 0.8;
  const auto q = extract_peaks(adj, 0.1, 10);
  REQUIRE(q.size() == 1);
  CHECK(q[0].a == 2);

  Heatmap tie(4, 4, 1, 0.0);
  tie.at(1, 1, 0) = 0.7;
  tie.at(1, 2, 0) = 0.7;
  const auto t = extract_peaks(tie, 0.1, 10);
  REQUIRE(t.size() == 1);
  CHECK(t[0].a == 1);
  CHECK_THROWS_AS(extract_peaks(tie, 0.0, 1), Error);
}

TEST_CASE("peaks: brute-force NMS on random grids up to 32x32") {
  fixture::Rng rng(21);
  for (int t = 0; t < 300; ++t) {
    const int rows = fixture::uniform_int(rng, 1, 32);
    const int cols = fixture::uniform_int(rng, 1, 32);
    const int classes = fixture::uniform_int(rng, 1, 3);
    Heatmap hm(rows, cols, classes);
    // Coarse levels force plenty of ties.
    for (auto& v : hm.values) v = fixture::uniform_int(rng, 0, 8) / 8.0;
    const double thr = fixture::uniform_int(rng, 1, 8) / 8.0;
    const int top_k = fixture::uniform_int(rng, 1, 40);
    const auto got = extract_peaks(hm, thr, top_k);
    const auto want = oracle::nms(hm.values, rows, cols, classes, thr, top_k);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].a == want[i].a);
      CHECK(got[i].b == want[i].b);
      CHECK(got[i].class_id == want[i].cls);
      CHECK(got[i].score == want[i].score);
    }
  }
}

TEST_CASE("peaks: gaussian splats recover their centres") {
  const auto hm = fixture::splat(40, 40, 2, {{{5, 7}, 0}, {{30, 22}, 1}, {{18, 30}, 0}}, 2.0);
  const auto p = extract_peaks(hm, 0.5, 10);
  REQUIRE(p.size() == 3);
  CHECK(p[0].class_id == 0);
  CHECK(p[2] == Peak{30, 22, 1, 1.0});
}

TEST_CASE("bbox assembly") {
  SizeOffsetMaps m(30, 30);
  m.size_at(20, 10)[0] = 4;
  m.size_at(20, 10)[1] = 6;
  m.offset_at(20, 10)[0] = 0.3;
  m.offset_at(20, 10)[1] = -0.2;
  const BoxF f = assemble_bbox_raw(Peak{10, 20, 0, 1.0}, m, 1);
  CHECK(f.a1 == doctest::Approx(8.3));
  CHECK(f.b1 == doctest::Approx(16.8));
  CHECK(f.a2 == doctest::Approx(12.3));
  CHECK(f.b2 == doctest::Approx(22.8));
  const auto r = assemble_bbox(Peak{10, 20, 0, 1.0}, m, 1, 100, 100);
  CHECK(*r == PixelBox{8, 16, 13, 23});

  SizeOffsetMaps z(10, 10);
  z.size_at(5, 5)[0] = 2;
  z.size_at(5, 5)[1] = 2;
  CHECK(*assemble_bbox(Peak{5, 5, 0, 1.0}, z, 4, 100, 100) == PixelBox{16, 16, 24, 24});
  CHECK_FALSE(assemble_bbox(Peak{1, 1, 0, 1.0}, z, 4, 100, 100).has_value());
  // Clipped at the frame edge.
  z.size_at(0, 0)[0] = 6;
  z.size_at(0, 0)[1] = 1;
  CHECK(*assemble_bbox(Peak{0, 0, 0, 1.0}, z, 4, 100, 100) == PixelBox{0, 0, 12, 2});
}

TEST_CASE("bbox assembly inverts exact maps") {
  fixture::Rng rng(22);
  for (int t = 0; t < 500; ++t) {
    const int stride = fixture::uniform_int(rng, 1, 8);
    const PixelBox box = fixture::random_box(rng, 256, 192);
    const double pa = (box.a1 + box.a2) / 2.0;
    const double pb = (box.b1 + box.b2) / 2.0;
    const CellIndex c = gt_to_lowres(pa, pb, stride);
    SizeOffsetMaps m(192 / stride + 1, 256 / stride + 1);
    m.size_at(c.b, c.a)[0] = double(box.width()) / stride;
    m.size_at(c.b, c.a)[1] = double(box.height()) / stride;
    m.offset_at(c.b, c.a)[0] = pa / stride - c.a;
    m.offset_at(c.b, c.a)[1] = pb / stride - c.b;
    CHECK(*assemble_bbox(Peak{c.a, c.b, 0, 1.0}, m, stride, 256, 192) == box);
    const PixelBox boxes[1] = {box};
    const auto l = size_offset_losses(m, boxes, stride);
    CHECK(std::abs(l.size) < 1e-12);
    CHECK(std::abs(l.offset) < 1e-12);
  }
}

TEST_CASE("low-resolution mapping") {
  CHECK(gt_to_lowres(37, 22, 4) == CellIndex{9, 5});
  CHECK(gt_to_lowres(0, 0, 4) == CellIndex{0, 0});
  fixture::Rng rng(23);
  for (int i = 0; i < 1000; ++i) {
    const double x = fixture::uniform_real(rng, 0, 1000);
    const double y = fixture::uniform_real(rng, 0, 1000);
    const int s = fixture::uniform_int(rng, 1, 16);
    const CellIndex c = gt_to_lowres(x, y, s);
    CHECK(c.a == static_cast<int>(x / s));
    CHECK(c.b == static_cast<int>(y / s));
  }
}

TEST_CASE("focal loss") {
  Heatmap y(8, 8, 1, 0.0);
  y.at(3, 4, 0) = 1.0;
  Heatmap p(8, 8, 1, 0.0);
  p.at(3, 4, 0) = 0.5;
  CHECK(focal_loss(p, y, 2, 4) == doctest::Approx(0.1733).epsilon(1e-4));
  CHECK(focal_loss(p, y, 2, 4) == doctest::Approx(-0.25 * std::log(0.5)).epsilon(1e-12));
  p.at(3, 4, 0) = 1.0;
  CHECK(focal_loss(p, y, 2, 4) < 1e-10);
  CHECK_THROWS_AS(focal_loss(p, Heatmap(8, 8, 1, 0.0), 2, 4), Error);
  CHECK_THROWS_AS(focal_loss(Heatmap(8, 7, 1), y, 2, 4), Error);

  fixture::Rng rng(24);
  for (int t = 0; t < 200; ++t) {
    const auto gt = fixture::splat(8, 8, 2, {{{fixture::uniform_int(rng, 0, 7), fixture::uniform_int(rng, 0, 7)}, 0}},
                                   fixture::uniform_real(rng, 0.5, 3));
    Heatmap pred(8, 8, 2);
    for (auto& v : pred.values) v = fixture::uniform_real(rng, 0, 1);
    const double got = focal_loss(pred, gt, 2, 4);
    CHECK(got >= 0);
    CHECK(std::fabs(got - oracle::focal(pred.values, gt.values, 2, 4)) < 1e-10);
  }
}

TEST_CASE("size and offset losses") {
  SizeOffsetMaps m(10, 10);
  const PixelBox box{3, 2, 7, 8};  // centre (5, 5), size (4, 6)
  m.size_at(5, 5)[0] = 5;
  m.size_at(5, 5)[1] = 5;
  const PixelBox boxes[1] = {box};
  const auto l = size_offset_losses(m, boxes, 1);
  CHECK(l.size == doctest::Approx(2.0));
  CHECK(l.offset == doctest::Approx(0.0));
  CHECK_THROWS_AS(size_offset_losses(m, std::span<const PixelBox>{}, 1), Error);
  CHECK(total_parsing_loss(1, 2, 3, 0.1, 1) == doctest::Approx(4.2));
  CHECK(total_parsing_loss(0, 0, 0, 0.1, 1) == 0.0);
}

TEST_CASE("annotations") {
  const auto a = parse_annotations(
      "frame,class,x,y,w,h\n# comment\n\n0, person, 10, 20, 30, 40\n0 2 100 100 50 50\n3,car,90,90,20,20\n", 120,
      110);
  CHECK(a.total() == 3);
  const auto f0 = a.objects_for(0);
  REQUIRE(f0.size() == 2);
  CHECK(f0[0].bbox == PixelBox{10, 20, 40, 60});
  CHECK(f0[0].class_id == 0);
  CHECK(f0[1].bbox == PixelBox{100, 100, 120, 110});
  CHECK(a.warnings.size() == 1);
  CHECK(a.objects_for(1).empty());
  CHECK(parse_annotations("", 10, 10).total() == 0);

  for (const char* bad : {"0,person,1,2,3\n", "0,nosuchclass,1,1,2,2\n", "x,0,1,1,2,2\n", "0,0,1,1,0,5\n",
                          "0,0,500,500,2,2\n"}) {
    try {
      parse_annotations(bad, 100, 100);
      FAIL("accepted " << bad);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::format);
      CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
  }
}
