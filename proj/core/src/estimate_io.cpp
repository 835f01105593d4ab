#include "pfc/estimate_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pfc {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_estimate(std::ostream& os, const PolyhedralCone& cone,
                    const EstimateProvenance& prov) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, prov.config_hash);
  os << "pfc-estimate 1\n";
  os << "seed " << prov.seed << "\n";
  os << "config_hash " << hash << "\n";
  os << "char_length " << g17(cone.char_length) << "\n";
  os << "phi " << g17(prov.phi) << "\n";
  os << "labelled " << (cone.labelled ? 1 : 0) << "\n";
  os << "edges " << cone.edges.size() << "\n";
  for (size_t i = 0; i < cone.edges.size(); ++i) {
    const Vec3& e = cone.edges[i];
    os << "edge " << i << " " << g17(e.x()) << " " << g17(e.y()) << " " << g17(e.z())
       << " contact " << cone.edge_contact[i] << " label "
       << to_string(i < cone.edge_labels.size() ? cone.edge_labels[i] : ModeLabel::Static)
       << "\n";
  }
  os << "faces " << cone.faces.size() << "\n";
  for (size_t i = 0; i < cone.faces.size(); ++i) {
    const ConeFace& f = cone.faces[i];
    os << "face " << i << " " << f.e0 << " " << f.e1 << " label " << to_string(f.label)
       << " pivot_contact " << f.pivot_contact << " normal " << g17(f.outward_normal.x())
       << " " << g17(f.outward_normal.y()) << " " << g17(f.outward_normal.z()) << "\n";
  }
}

void write_estimate_file(const std::string& path, const PolyhedralCone& cone,
                         const EstimateProvenance& prov) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  write_estimate(os, cone, prov);
}

namespace {

std::string expect_key(std::istream& is, const std::string& key) {
  std::string k;
  if (!(is >> k) || k != key)
    throw ConfigError("estimate document: expected '" + key + "', got '" + k + "'");
  return k;
}

}  // namespace

EstimateDocument read_estimate(std::istream& is) {
  EstimateDocument doc;
  std::string word;
  if (!(is >> word) || word != "pfc-estimate")
    throw ConfigError("estimate document: bad magic");
  int version = 0;
  is >> version;
  if (version != 1) throw ConfigError("estimate document: unsupported version");

  expect_key(is, "seed");
  is >> doc.provenance.seed;
  expect_key(is, "config_hash");
  std::string hash;
  is >> hash;
  doc.provenance.config_hash = std::stoull(hash, nullptr, 16);
  expect_key(is, "char_length");
  is >> doc.cone.char_length;
  expect_key(is, "phi");
  is >> doc.provenance.phi;
  expect_key(is, "labelled");
  int labelled = 0;
  is >> labelled;
  doc.cone.labelled = labelled != 0;

  expect_key(is, "edges");
  size_t n = 0;
  is >> n;
  doc.cone.edges.resize(n);
  doc.cone.edge_contact.resize(n);
  doc.cone.edge_labels.resize(n);
  for (size_t i = 0; i < n; ++i) {
    expect_key(is, "edge");
    size_t idx;
    is >> idx;
    Vec3& e = doc.cone.edges[idx];
    is >> e.x() >> e.y() >> e.z();
    expect_key(is, "contact");
    is >> doc.cone.edge_contact[idx];
    expect_key(is, "label");
    std::string lbl;
    is >> lbl;
    doc.cone.edge_labels[idx] = mode_from_string(lbl);
  }

  expect_key(is, "faces");
  size_t m = 0;
  is >> m;
  doc.cone.faces.resize(m);
  for (size_t i = 0; i < m; ++i) {
    expect_key(is, "face");
    size_t idx;
    is >> idx;
    ConeFace& f = doc.cone.faces[idx];
    is >> f.e0 >> f.e1;
    expect_key(is, "label");
    std::string lbl;
    is >> lbl;
    f.label = mode_from_string(lbl);
    expect_key(is, "pivot_contact");
    is >> f.pivot_contact;
    expect_key(is, "normal");
    is >> f.outward_normal.x() >> f.outward_normal.y() >> f.outward_normal.z();
  }
  if (!is) throw ConfigError("estimate document: truncated");
  return doc;
}

EstimateDocument read_estimate_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open estimate file " + path);
  return read_estimate(is);
}

}  // namespace pfc
