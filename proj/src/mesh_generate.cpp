#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "archcal/mesh.hpp"
#include "archcal/shapes.hpp"

namespace archcal {
namespace {

int add_node(Mesh& m, Vec2 p) {
  m.nodes.push_back(p);
  return static_cast<int>(m.nodes.size()) - 1;
}

// Structured block of quad8 cells between two radii.  Columns live on a
// shared angular lattice; joint columns carry two coincident node copies so
// radial interface elements can be threaded between bricks.
struct Block {
  int nlat = 0;   // angular cells
  int nrows = 0;  // radial cells
  std::vector<int> cl, cr;  // corner-column nodes, (2*nrows+1) x (nlat+1)
  std::vector<int> mid;     // cell-mid nodes at corner rows, (nrows+1) x nlat

  int& L(int rl, int c) { return cl[rl * (nlat + 1) + c]; }
  int& R(int rl, int c) { return cr[rl * (nlat + 1) + c]; }
  int& M(int rr, int c) { return mid[rr * nlat + c]; }
};

Block build_block(Mesh& m, const ArchGeometry& g, const std::vector<double>& lat,
                  double r_in, double r_out, int nrows,
                  const std::vector<int>& joints) {
  Block b;
  b.nlat = static_cast<int>(lat.size()) - 1;
  b.nrows = nrows;
  b.cl.assign((2 * nrows + 1) * (b.nlat + 1), -1);
  b.cr.assign((2 * nrows + 1) * (b.nlat + 1), -1);
  b.mid.assign((nrows + 1) * b.nlat, -1);

  auto radius = [&](int rl) { return r_in + rl * (r_out - r_in) / (2.0 * nrows); };
  std::vector<char> is_joint(b.nlat + 1, 0);
  for (int j : joints) is_joint[j] = 1;

  for (int c = 0; c <= b.nlat; ++c)
    for (int rl = 0; rl <= 2 * nrows; ++rl) {
      const Vec2 p = g.point(radius(rl), lat[c]);
      b.L(rl, c) = add_node(m, p);
      b.R(rl, c) = is_joint[c] ? add_node(m, p) : b.L(rl, c);
    }
  for (int c = 0; c < b.nlat; ++c)
    for (int rr = 0; rr <= nrows; ++rr)
      b.M(rr, c) = add_node(m, g.point(radius(2 * rr), 0.5 * (lat[c] + lat[c + 1])));

  for (int ri = 0; ri < nrows; ++ri)
    for (int c = 0; c < b.nlat; ++c) {
      std::array<int, 8> q{};
      q[0] = b.R(2 * ri, c);
      q[1] = b.L(2 * ri, c + 1);
      q[2] = b.L(2 * ri + 2, c + 1);
      q[3] = b.R(2 * ri + 2, c);
      q[4] = b.M(ri, c);
      q[5] = b.L(2 * ri + 1, c + 1);
      q[6] = b.M(ri + 1, c);
      q[7] = b.R(2 * ri + 1, c);
      m.quads.push_back(q);
      m.quad_group.push_back(0);
    }

  // Radial joint elements: lower-angle side is the bottom chain, so the
  // reference normal is the in-plane tangent pointing towards growing angle.
  for (int j : joints)
    for (int ri = 0; ri < nrows; ++ri) {
      InterfaceElem e;
      e.n = {b.L(2 * ri, j),     b.L(2 * ri + 1, j), b.L(2 * ri + 2, j),
             b.R(2 * ri, j),     b.R(2 * ri + 1, j), b.R(2 * ri + 2, j)};
      e.role = JointRole::kRadial;
      e.nx = std::cos(lat[j]);
      e.ny = -std::sin(lat[j]);
      e.mid_angle = lat[j];
      e.mid_radius = radius(2 * ri + 1);
      m.interfaces.push_back(e);
    }
  return b;
}

// Bed-joint elements tying the top edge of `lo` to the bottom edge of `hi`.
void stitch_blocks(Mesh& m, const std::vector<double>& lat, Block& lo, Block& hi,
                   double r_if) {
  for (int c = 0; c < lo.nlat; ++c) {
    InterfaceElem e;
    e.n = {lo.R(2 * lo.nrows, c), lo.M(lo.nrows, c), lo.L(2 * lo.nrows, c + 1),
           hi.R(0, c),            hi.M(0, c),        hi.L(0, c + 1)};
    e.role = JointRole::kCircumferential;
    const double a = 0.5 * (lat[c] + lat[c + 1]);
    e.nx = std::sin(a);
    e.ny = std::cos(a);
    e.mid_angle = a;
    e.mid_radius = r_if;
    m.interfaces.push_back(e);
  }
}

std::vector<double> build_lattice(const ArchGeometry& g, int per_brick) {
  const double theta = g.half_angle();
  const int n_mid = std::max<int>(
      2, static_cast<int>(std::llround(g.arc_length(g.centerline_radius()) / g.joint_pitch())));
  int nlat = std::max(2, per_brick * n_mid);
  for (int k = 1; k <= g.ring_count; ++k)
    nlat = std::max(nlat, 2 * expected_radial_joints(g, k) + 2);
  std::vector<double> lat(nlat + 1);
  for (int i = 0; i <= nlat; ++i) lat[i] = -theta + 2.0 * theta * i / nlat;
  return lat;
}

// Joint lattice indices for one ring: evenly pitched and centred, nudged by
// half a pitch when the crown phase breaks the stretcher bond, then snapped
// onto the shared lattice.
std::vector<int> place_joints(const ArchGeometry& g, int ring,
                              const std::vector<double>& lat) {
  const int nj = expected_radial_joints(g, ring);
  if (nj < 1) {
    std::ostringstream os;
    os << "ring " << ring << " arc admits fewer than 2 bricks";
    throw InputError(os.str());
  }
  const double theta = g.half_angle();
  const double dphi = g.joint_pitch() / g.ring_mid_radius(ring);
  double off = -0.5 * (nj - 1) * dphi;

  const double crown_u = std::fabs(std::remainder(-off / dphi, 1.0));  // in [0, 0.5]
  const double want = (ring % 2 == 1) ? 0.0 : 0.5;
  if (std::fabs(crown_u - want) > 0.25) {
    for (double d : {0.5 * dphi, -0.5 * dphi}) {
      const double lo = theta + off + d, hi = theta - (off + d + (nj - 1) * dphi);
      if (lo >= 0.25 * dphi && hi >= 0.25 * dphi) {
        off += d;
        break;
      }
    }
  }

  const int nlat = static_cast<int>(lat.size()) - 1;
  const double step = 2.0 * theta / nlat;
  std::vector<int> idx(nj);
  int prev = 0;
  for (int k = 0; k < nj; ++k) {
    const int hi = nlat - (nj - k);
    if (prev + 1 > hi) throw InputError("cannot place radial joints on the lattice");
    int i = static_cast<int>(std::llround((off + k * dphi + theta) / step));
    idx[k] = std::clamp(i, prev + 1, hi);
    prev = idx[k];
  }
  return idx;
}

double patch_target_angle(const ArchGeometry& g, double frac) {
  return g.angle_at_x(frac * g.span);
}

void add_extrados_patch(Mesh& m, const std::string& name, double frac,
                        double length) {
  const ArchGeometry& g = m.geom;
  const double r = g.extrados_radius();
  const double a0 = patch_target_angle(g, frac);
  const double half = 0.5 * length / r;
  Patch p;
  for (const auto& e : m.extrados_edges) {
    const Vec2 c = g.center();
    const Vec2 pm = m.nodes[e[1]];
    const double a = std::atan2(pm.x - c.x, pm.y - c.y);
    if (a >= a0 - half && a <= a0 + half) {
      p.edges.push_back(e);
      const Vec2 pl = m.nodes[e[0]], pr = m.nodes[e[2]];
      p.length += r * std::fabs(std::atan2(pr.x - c.x, pr.y - c.y) -
                                std::atan2(pl.x - c.x, pl.y - c.y));
    }
  }
  if (p.edges.empty()) {
    // degenerate resolution: take the single closest edge
    double best = 1e300;
    std::array<int, 3> pick{};
    for (const auto& e : m.extrados_edges) {
      const Vec2 c = g.center();
      const Vec2 pm = m.nodes[e[1]];
      const double a = std::atan2(pm.x - c.x, pm.y - c.y);
      if (std::fabs(a - a0) < best) {
        best = std::fabs(a - a0);
        pick = e;
      }
    }
    p.edges.push_back(pick);
    p.length = 2.0 * r * std::asin(
        0.5 * std::hypot(m.nodes[pick[2]].x - m.nodes[pick[0]].x,
                         m.nodes[pick[2]].y - m.nodes[pick[0]].y) / r);
  }
  m.patches[name] = p;
}

void add_monitor(Mesh& m, const std::string& name, double frac,
                 const std::vector<char>& joint_col) {
  const ArchGeometry& g = m.geom;
  const double a0 = patch_target_angle(g, frac);
  const Vec2 c = g.center();
  double best = 1e300;
  int pick = -1;
  for (size_t i = 0; i < m.extrados_edges.size(); ++i) {
    for (int side = 0; side < 2; ++side) {
      const int col = static_cast<int>(i) + side;
      if (col < static_cast<int>(joint_col.size()) && joint_col[col]) continue;
      const int nid = m.extrados_edges[i][side == 0 ? 0 : 2];
      const Vec2 p = m.nodes[nid];
      const double a = std::atan2(p.x - c.x, p.y - c.y);
      if (std::fabs(a - a0) < best) {
        best = std::fabs(a - a0);
        pick = nid;
      }
    }
  }
  m.node_sets[name] = {pick};
}

void finish_arch_sets(Mesh& m, const std::vector<Block*>& blocks,
                      const std::vector<char>& top_joint_col,
                      double patch_length) {
  std::vector<int> left, right;
  for (Block* b : blocks)
    for (int rl = 0; rl <= 2 * b->nrows; ++rl) {
      left.push_back(b->L(rl, 0));
      right.push_back(b->L(rl, b->nlat));
      if (b->R(rl, b->nlat) != b->L(rl, b->nlat)) right.push_back(b->R(rl, b->nlat));
    }
  m.node_sets["springing_left"] = left;
  m.node_sets["springing_right"] = right;

  Block* top = blocks.back();
  m.extrados_edges.clear();
  for (int c = 0; c < top->nlat; ++c)
    m.extrados_edges.push_back({top->R(2 * top->nrows, c), top->M(top->nrows, c),
                                top->L(2 * top->nrows, c + 1)});

  add_extrados_patch(m, "quarter", 0.25, patch_length);
  add_extrados_patch(m, "mid", 0.5, patch_length);
  add_extrados_patch(m, "three_quarter", 0.75, patch_length);
  add_monitor(m, "monitor_quarter", 0.25, top_joint_col);
  add_monitor(m, "monitor_three_quarter", 0.75, top_joint_col);
}

}  // namespace

int expected_radial_joints(const ArchGeometry& g, int ring) {
  return static_cast<int>(
      std::llround(g.arc_length(g.ring_mid_radius(ring)) / g.joint_pitch()));
}

Mesh generate_mesoscale(const ArchGeometry& g, const MesoOptions& opt) {
  g.validate();
  if (opt.columns_per_brick < 1 || opt.rows_per_ring < 1)
    throw InputError("mesoscale subdivision counts must be positive");
  Mesh m;
  m.geom = g;
  const std::vector<double> lat = build_lattice(g, opt.columns_per_brick);

  std::vector<Block> blocks(g.ring_count);
  std::vector<char> top_joint_col(lat.size(), 0);
  for (int k = 1; k <= g.ring_count; ++k) {
    const std::vector<int> joints = place_joints(g, k, lat);
    blocks[k - 1] = build_block(m, g, lat, g.ring_inner_radius(k),
                                g.ring_outer_radius(k), opt.rows_per_ring, joints);
    if (k == g.ring_count)
      for (int j : joints) top_joint_col[j] = 1;
  }
  for (int k = 0; k + 1 < g.ring_count; ++k)
    stitch_blocks(m, lat, blocks[k], blocks[k + 1], g.ring_outer_radius(k + 1));

  std::vector<Block*> ptrs;
  for (auto& b : blocks) ptrs.push_back(&b);
  finish_arch_sets(m, ptrs, top_joint_col, opt.patch_length);
  check_element_quality(m);
  return m;
}

Mesh generate_macroscale(const ArchGeometry& g, const MacroOptions& opt) {
  g.validate();
  if (opt.n_thk < 2)
    throw InputError(
        "macroscale barrel needs at least two elements through the thickness");
  if (opt.hybrid && opt.n_thk % 2 != 0)
    throw InputError("hybrid mid-thickness split needs an even element count");
  if (opt.n_len < 2) throw InputError("macroscale arc resolution too coarse");

  Mesh m;
  m.geom = g;
  const double theta = g.half_angle();
  std::vector<double> lat(opt.n_len + 1);
  for (int i = 0; i <= opt.n_len; ++i)
    lat[i] = -theta + 2.0 * theta * i / opt.n_len;

  const double ri = g.intrados_radius(), ro = g.extrados_radius();
  std::vector<Block> blocks;
  if (!opt.hybrid) {
    blocks.push_back(build_block(m, g, lat, ri, ro, opt.n_thk, {}));
  } else {
    const double rc = 0.5 * (ri + ro);
    blocks.push_back(build_block(m, g, lat, ri, rc, opt.n_thk / 2, {}));
    blocks.push_back(build_block(m, g, lat, rc, ro, opt.n_thk / 2, {}));
    stitch_blocks(m, lat, blocks[0], blocks[1], rc);
  }

  std::vector<Block*> ptrs;
  for (auto& b : blocks) ptrs.push_back(&b);
  finish_arch_sets(m, ptrs, std::vector<char>(lat.size(), 0), opt.patch_length);
  check_element_quality(m);
  return m;
}

namespace {

struct ChainPt {
  double x = 0.0, ybot = 0.0;
  bool on_arch = false;
  std::array<int, 3> arch_edge{-1, -1, -1};  // edge ending at this point (left side)
};

}  // namespace

void attach_backfill(Mesh& m, const BackfillOptions& opt) {
  const ArchGeometry& g = m.geom;
  if (m.extrados_edges.empty())
    throw InputError("backfill requires a generated arch mesh");
  if (opt.cover <= 0.0) throw InputError("backfill cover must be positive");
  if (opt.layers < 1) throw InputError("backfill needs at least one layer");
  const double top = g.rise + 0.5 * g.thickness + opt.cover;
  m.backfill_top = top;

  const Vec2 c = g.center();
  const double ro = g.extrados_radius();
  // x where the extrados circle meets the springing line y = 0
  const double reach = std::sqrt(std::max(0.0, ro * ro - c.y * c.y));
  const double x0l = c.x - reach, x0r = c.x + reach;
  const double xl = -opt.horiz_extent, xr = g.span + opt.horiz_extent;
  if (xl >= x0l - opt.ground_spacing || xr <= x0r + opt.ground_spacing)
    throw InputError("backfill horizontal extent too small for this arch");
  auto arc_y = [&](double x) {
    const double dx = x - c.x;
    return c.y + std::sqrt(std::max(0.0, ro * ro - dx * dx));
  };
  if (top <= arc_y(0.5 * g.span) + 1e-9)
    throw InputError("backfill cover too small: flat top intersects the arch");

  // Column chain left to right: ground, abutment skirt, extrados, skirt, ground.
  std::vector<ChainPt> chain;
  const int ngl = std::max(1, static_cast<int>(std::lround((x0l - xl) / opt.ground_spacing)));
  for (int i = 0; i <= ngl; ++i)
    chain.push_back({xl + (x0l - xl) * i / ngl, 0.0, false, {-1, -1, -1}});

  const double xel = m.nodes[m.extrados_edges.front()[0]].x;
  const double xer = m.nodes[m.extrados_edges.back()[2]].x;
  for (int i = 1; i < 2; ++i) {
    const double x = x0l + (xel - x0l) * i / 2.0;
    chain.push_back({x, arc_y(x), false, {-1, -1, -1}});
  }
  chain.push_back({xel, m.nodes[m.extrados_edges.front()[0]].y, true, {-1, -1, -1}});
  for (const auto& e : m.extrados_edges)
    chain.push_back({m.nodes[e[2]].x, m.nodes[e[2]].y, true, e});
  for (int i = 1; i < 2; ++i) {
    const double x = xer + (x0r - xer) * i / 2.0;
    chain.push_back({x, arc_y(x), false, {-1, -1, -1}});
  }
  const int ngr = std::max(1, static_cast<int>(std::lround((xr - x0r) / opt.ground_spacing)));
  for (int i = 0; i <= ngr; ++i)
    chain.push_back({x0r + (xr - x0r) * i / ngr, 0.0, false, {-1, -1, -1}});

  const int nc = static_cast<int>(chain.size());
  const int nl = opt.layers;

  // Duplicate extrados nodes for the backfill side, one per geometric position.
  std::map<long long, int> dup;
  auto dup_at = [&](Vec2 p) {
    const long long key = std::llround(p.x * 1e6);
    auto it = dup.find(key);
    if (it != dup.end()) return it->second;
    const int id = add_node(m, p);
    dup[key] = id;
    return id;
  };

  std::vector<int> grid(nc * (nl + 1), -1);
  auto G = [&](int ci, int k) -> int& { return grid[ci * (nl + 1) + k]; };
  for (int ci = 0; ci < nc; ++ci) {
    for (int k = 0; k <= nl; ++k) {
      const double y = chain[ci].ybot + (top - chain[ci].ybot) * k / nl;
      if (k == 0 && chain[ci].on_arch)
        G(ci, 0) = dup_at({chain[ci].x, chain[ci].ybot});
      else
        G(ci, k) = add_node(m, {chain[ci].x, y});
    }
  }

  // Bond interfaces along the real extrados, one per arch edge.
  for (const auto& e : m.extrados_edges) {
    InterfaceElem ie;
    const int d0 = dup_at(m.nodes[e[0]]);
    const int d1 = dup_at(m.nodes[e[1]]);
    const int d2 = dup_at(m.nodes[e[2]]);
    ie.n = {e[0], e[1], e[2], d0, d1, d2};
    ie.role = JointRole::kExtradosBond;
    const Vec2 pm = m.nodes[e[1]];
    const double a = std::atan2(pm.x - c.x, pm.y - c.y);
    ie.nx = std::sin(a);
    ie.ny = std::cos(a);
    ie.mid_angle = a;
    ie.mid_radius = ro;
    m.interfaces.push_back(ie);
  }

  // Mid-edge bookkeeping: curved bottom edges reuse the bond duplicates or sit
  // on the abutment arc; everything else is a straight midpoint.
  std::map<std::pair<int, int>, int> edge_mid;
  auto mid_of = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = edge_mid.find(key);
    if (it != edge_mid.end()) return it->second;
    const Vec2 pa = m.nodes[a], pb = m.nodes[b];
    const int id = add_node(m, {0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
    edge_mid[key] = id;
    return id;
  };
  for (int ci = 0; ci + 1 < nc; ++ci) {
    const int a = G(ci, 0), b = G(ci + 1, 0);
    const auto key = std::minmax(a, b);
    if (chain[ci + 1].on_arch && chain[ci + 1].arch_edge[0] >= 0) {
      edge_mid[key] = dup_at(m.nodes[chain[ci + 1].arch_edge[1]]);
    } else if (!(chain[ci].ybot == 0.0 && chain[ci + 1].ybot == 0.0)) {
      const double xm = 0.5 * (chain[ci].x + chain[ci + 1].x);
      edge_mid[key] = add_node(m, {xm, arc_y(xm)});
    }
  }

  auto push_tri = [&](int n0, int n1, int n2) {
    m.tris.push_back({n0, n1, n2, mid_of(n0, n1), mid_of(n1, n2), mid_of(n2, n0)});
  };
  for (int ci = 0; ci + 1 < nc; ++ci)
    for (int k = 0; k < nl; ++k) {
      const int bl = G(ci, k), br = G(ci + 1, k);
      const int tl = G(ci, k + 1), tr = G(ci + 1, k + 1);
      push_tri(bl, br, tr);
      push_tri(bl, tr, tl);
    }

  // Restraints: the ground and abutment chain is fully fixed, the vertical
  // sides slide vertically.
  std::vector<int> base, sl, sr;
  for (int ci = 0; ci < nc; ++ci)
    if (!chain[ci].on_arch) base.push_back(G(ci, 0));
  for (int ci = 0; ci + 1 < nc; ++ci) {
    if (chain[ci].on_arch && chain[ci + 1].on_arch) continue;
    auto it = edge_mid.find(std::minmax(G(ci, 0), G(ci + 1, 0)));
    if (it != edge_mid.end()) base.push_back(it->second);
  }
  for (int k = 0; k <= nl; ++k) {
    sl.push_back(G(0, k));
    sr.push_back(G(nc - 1, k));
    if (k < nl) {
      sl.push_back(mid_of(G(0, k), G(0, k + 1)));
      sr.push_back(mid_of(G(nc - 1, k), G(nc - 1, k + 1)));
    }
  }
  m.node_sets["backfill_base"] = base;
  m.node_sets["backfill_side_left"] = sl;
  m.node_sets["backfill_side_right"] = sr;

  Patch crest;
  const double xc = 0.25 * g.span, half = 0.5 * opt.crest_patch_length;
  for (int ci = 0; ci + 1 < nc; ++ci) {
    const double xm = 0.5 * (chain[ci].x + chain[ci + 1].x);
    if (xm >= xc - half && xm <= xc + half) {
      const int a = G(ci, nl), b = G(ci + 1, nl);
      crest.edges.push_back({a, mid_of(a, b), b});
      crest.length += chain[ci + 1].x - chain[ci].x;
    }
  }
  if (crest.edges.empty()) throw InputError("crest patch missed the backfill top");
  m.patches["crest_quarter"] = crest;

  m.has_backfill = true;
  check_element_quality(m);
}

void check_element_quality(const Mesh& m) {
  std::array<double, 8> N8, dx8, de8;
  for (size_t qi = 0; qi < m.quads.size(); ++qi) {
    for (const auto& gp : quad_gauss9()) {
      quad8_shape(gp.xi, gp.eta, N8, dx8, de8);
      double j11 = 0, j12 = 0, j21 = 0, j22 = 0;
      for (int a = 0; a < 8; ++a) {
        const Vec2 p = m.nodes[m.quads[qi][a]];
        j11 += dx8[a] * p.x;
        j12 += dx8[a] * p.y;
        j21 += de8[a] * p.x;
        j22 += de8[a] * p.y;
      }
      if (j11 * j22 - j12 * j21 <= 0.0) {
        std::ostringstream os;
        os << "quadrilateral " << qi << " has a non-positive Jacobian";
        throw ModelError(os.str());
      }
    }
  }
  std::array<double, 6> N6, dx6, de6;
  for (size_t ti = 0; ti < m.tris.size(); ++ti) {
    for (const auto& gp : tri_gauss3()) {
      tri6_shape(gp.xi, gp.eta, N6, dx6, de6);
      double j11 = 0, j12 = 0, j21 = 0, j22 = 0;
      for (int a = 0; a < 6; ++a) {
        const Vec2 p = m.nodes[m.tris[ti][a]];
        j11 += dx6[a] * p.x;
        j12 += dx6[a] * p.y;
        j21 += de6[a] * p.x;
        j22 += de6[a] * p.y;
      }
      if (j11 * j22 - j12 * j21 <= 0.0) {
        std::ostringstream os;
        os << "triangle " << ti << " has a non-positive Jacobian";
        throw ModelError(os.str());
      }
    }
  }
  for (size_t ii = 0; ii < m.interfaces.size(); ++ii)
    for (int k = 0; k < 3; ++k) {
      const Vec2 a = m.nodes[m.interfaces[ii].n[k]];
      const Vec2 b = m.nodes[m.interfaces[ii].n[k + 3]];
      if (std::hypot(a.x - b.x, a.y - b.y) > 1e-9) {
        std::ostringstream os;
        os << "interface " << ii << " node pair " << k << " not coincident";
        throw ModelError(os.str());
      }
    }
}

}  // namespace archcal
