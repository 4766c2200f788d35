#include "hdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

namespace hdg {

double Face::measure() const {
  return std::hypot(b.x - a.x, b.y - a.y);
}

Vec2 local_face_normal(int dim, int local) {
  if (dim == 1) return {local == 0 ? -1.0 : 1.0, 0.0};
  switch (local) {
    case 0: return {-1.0, 0.0};
    case 1: return {1.0, 0.0};
    case 2: return {0.0, -1.0};
    case 3: return {0.0, 1.0};
    default: throw MeshError("local face index out of range: " + std::to_string(local));
  }
}

int Mesh::num_interior_faces() const {
  int n = 0;
  for (const auto& f : faces_) n += f.kind == FaceKind::Interior ? 1 : 0;
  return n;
}

int Mesh::num_boundary_faces() const {
  return num_faces() - num_interior_faces();
}

int Mesh::element_of_cell(int i, int j) const {
  if (i < 0 || i >= nx_ || j < 0 || j >= ny_) return -1;
  return cell_to_element_[static_cast<std::size_t>(j * nx_ + i)];
}

int Mesh::locate(const Point& p) const {
  const double tol = 1e-12 * (std::abs(dx_) + std::abs(dy_));
  int i = static_cast<int>(std::floor((p.x - origin_.x) / dx_));
  i = std::clamp(i, 0, nx_ - 1);
  int j = 0;
  if (dim_ == 2) {
    j = static_cast<int>(std::floor((p.y - origin_.y) / dy_));
    j = std::clamp(j, 0, ny_ - 1);
  }
  const int e = element_of_cell(i, j);
  if (e < 0) return -1;
  const auto& el = elements_[static_cast<std::size_t>(e)];
  if (p.x < el.lo.x - tol || p.x > el.hi.x + tol) return -1;
  if (dim_ == 2 && (p.y < el.lo.y - tol || p.y > el.hi.y + tol)) return -1;
  return e;
}

FaceNeighbors Mesh::face_neighbors(int face_id) const {
  if (face_id < 0 || face_id >= num_faces()) {
    throw MeshError("invalid face id " + std::to_string(face_id));
  }
  const auto& f = faces_[static_cast<std::size_t>(face_id)];
  FaceNeighbors out;
  out.minus = f.minus;
  if (f.plus >= 0) out.plus = f.plus;
  out.normal = f.normal;
  return out;
}

double Mesh::fluid_measure() const {
  double total = 0.0;
  for (const auto& e : elements_) total += dim_ == 1 ? e.hx() : e.hx() * e.hy();
  return total;
}

Mesh build_interval_mesh(double a, double b, int n_elements) {
  if (n_elements < 1) throw MeshError("interval mesh needs at least one element");
  if (!(a < b)) throw MeshError("interval mesh needs a < b");

  Mesh m;
  m.dim_ = 1;
  m.nx_ = n_elements;
  m.ny_ = 1;
  m.origin_ = {a, 0.0};
  m.dx_ = (b - a) / n_elements;
  m.cell_to_element_.resize(static_cast<std::size_t>(n_elements));

  auto node = [&](int i) { return i == n_elements ? b : a + i * m.dx_; };
  for (int i = 0; i < n_elements; ++i) {
    Element e;
    e.id = i;
    e.cell = i;
    e.lo = {node(i), 0.0};
    e.hi = {node(i + 1), 0.0};
    e.faces = {i, i + 1, -1, -1};
    m.elements_.push_back(e);
    m.cell_to_element_[static_cast<std::size_t>(i)] = i;
  }
  for (int i = 0; i <= n_elements; ++i) {
    Face f;
    f.id = i;
    f.axis = FaceAxis::X;
    f.a = f.b = {node(i), 0.0};
    if (i == 0) {
      f.kind = FaceKind::Boundary;
      f.minus = 0;
      f.minus_local = 0;
      f.normal = {-1.0, 0.0};
    } else if (i == n_elements) {
      f.kind = FaceKind::Boundary;
      f.minus = n_elements - 1;
      f.minus_local = 1;
      f.normal = {1.0, 0.0};
    } else {
      f.kind = FaceKind::Interior;
      f.minus = i - 1;
      f.minus_local = 1;
      f.plus = i;
      f.plus_local = 0;
      f.normal = {1.0, 0.0};
    }
    m.faces_.push_back(f);
  }
  return m;
}

namespace {

void check_connected(const Mesh& m) {
  const int n = m.num_elements();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::queue<int> todo;
  todo.push(0);
  seen[0] = 1;
  int count = 1;
  while (!todo.empty()) {
    const int e = todo.front();
    todo.pop();
    for (int f : m.element(e).faces) {
      const auto& face = m.face(f);
      if (face.kind != FaceKind::Interior) continue;
      const int other = face.minus == e ? face.plus : face.minus;
      if (!seen[static_cast<std::size_t>(other)]) {
        seen[static_cast<std::size_t>(other)] = 1;
        ++count;
        todo.push(other);
      }
    }
  }
  if (count != n) {
    throw MeshError("solid mask disconnects the fluid region (" + std::to_string(count) + " of " +
                    std::to_string(n) + " fluid cells reachable)");
  }
}

}  // namespace

Mesh build_rect_mesh(std::array<double, 2> x_range, std::array<double, 2> y_range, int nx, int ny,
                     const CellMask& mask) {
  if (nx < 1 || ny < 1) throw MeshError("rectangular mesh needs nx, ny >= 1");
  if (!(x_range[0] < x_range[1]) || !(y_range[0] < y_range[1])) {
    throw MeshError("rectangular mesh needs nondegenerate ranges");
  }

  Mesh m;
  m.dim_ = 2;
  m.nx_ = nx;
  m.ny_ = ny;
  m.origin_ = {x_range[0], y_range[0]};
  m.dx_ = (x_range[1] - x_range[0]) / nx;
  m.dy_ = (y_range[1] - y_range[0]) / ny;

  auto xn = [&](int i) { return i == nx ? x_range[1] : x_range[0] + i * m.dx_; };
  auto yn = [&](int j) { return j == ny ? y_range[1] : y_range[0] + j * m.dy_; };

  m.cell_to_element_.assign(static_cast<std::size_t>(nx * ny), -1);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Point lo{xn(i), yn(j)};
      const Point hi{xn(i + 1), yn(j + 1)};
      const Point c{0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
      if (mask && mask(c)) continue;
      Element e;
      e.id = static_cast<int>(m.elements_.size());
      e.cell = j * nx + i;
      e.lo = lo;
      e.hi = hi;
      m.cell_to_element_[static_cast<std::size_t>(e.cell)] = e.id;
      m.elements_.push_back(e);
    }
  }
  if (m.elements_.empty()) throw MeshError("solid mask eliminates every cell");

  auto add_face = [&](FaceAxis axis, Point a, Point b, int left, int right) {
    // left/right: element ids on the low/high side of the face along its axis, -1 if none.
    if (left < 0 && right < 0) return;
    Face f;
    f.id = static_cast<int>(m.faces_.size());
    f.axis = axis;
    f.a = a;
    f.b = b;
    const int lo_local = axis == FaceAxis::X ? 1 : 3;  // face seen from the low-side element
    const int hi_local = axis == FaceAxis::X ? 0 : 2;
    const Vec2 up = axis == FaceAxis::X ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    if (left >= 0 && right >= 0) {
      f.kind = FaceKind::Interior;
      // the element with smaller index is always on the low side of a structured grid
      f.minus = left;
      f.minus_local = lo_local;
      f.plus = right;
      f.plus_local = hi_local;
      f.normal = up;
    } else if (left >= 0) {
      f.minus = left;
      f.minus_local = lo_local;
      f.normal = up;
    } else {
      f.minus = right;
      f.minus_local = hi_local;
      f.normal = {-up.x, -up.y};
    }
    m.elements_[static_cast<std::size_t>(f.minus)].faces[static_cast<std::size_t>(f.minus_local)] = f.id;
    if (f.plus >= 0) {
      m.elements_[static_cast<std::size_t>(f.plus)].faces[static_cast<std::size_t>(f.plus_local)] = f.id;
    }
    m.faces_.push_back(f);
  };

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      add_face(FaceAxis::X, {xn(i), yn(j)}, {xn(i), yn(j + 1)}, m.element_of_cell(i - 1, j),
               m.element_of_cell(i, j));
    }
  }
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      add_face(FaceAxis::Y, {xn(i), yn(j)}, {xn(i + 1), yn(j)}, m.element_of_cell(i, j - 1),
               m.element_of_cell(i, j));
    }
  }

  check_connected(m);
  return m;
}

std::vector<int> nested_dissection_faces(const Mesh& mesh, int leaf_size) {
  // Faces in doubled grid coordinates: grid lines are even, cell centres odd.
  struct Key {
    int face;
    long x2;
    long y2;
  };
  std::vector<Key> keys;
  keys.reserve(static_cast<std::size_t>(mesh.num_faces()));
  const Point o = mesh.origin();
  const double dy = mesh.dimension() == 2 ? mesh.cell_dy() : 1.0;
  for (const Face& f : mesh.faces()) {
    const Point m = f.midpoint();
    keys.push_back({f.id, std::lround(2.0 * (m.x - o.x) / mesh.cell_dx()), std::lround(2.0 * (m.y - o.y) / dy)});
  }
  std::vector<int> order;
  order.reserve(keys.size());
  std::function<void(std::vector<Key>&)> split = [&](std::vector<Key>& set) {
    if (static_cast<int>(set.size()) <= leaf_size) {
      for (const Key& k : set) order.push_back(k.face);
      return;
    }
    long xlo = set[0].x2, xhi = xlo, ylo = set[0].y2, yhi = ylo;
    for (const Key& k : set) {
      xlo = std::min(xlo, k.x2);
      xhi = std::max(xhi, k.x2);
      ylo = std::min(ylo, k.y2);
      yhi = std::max(yhi, k.y2);
    }
    const bool along_x = xhi - xlo >= yhi - ylo;
    const long lo = along_x ? xlo : ylo, hi = along_x ? xhi : yhi;
    long cut = (lo + hi) / 2;
    if (cut % 2 != 0) ++cut;
    if (cut <= lo || cut >= hi) {
      for (const Key& k : set) order.push_back(k.face);
      return;
    }
    std::vector<Key> left, right, separator;
    for (const Key& k : set) {
      const long c = along_x ? k.x2 : k.y2;
      (c < cut ? left : c > cut ? right : separator).push_back(k);
    }
    set.clear();
    set.shrink_to_fit();
    split(left);
    split(right);
    for (const Key& k : separator) order.push_back(k.face);
  };
  split(keys);
  return order;
}

}  // namespace hdg
