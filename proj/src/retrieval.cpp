#include "chemreward/retrieval.hpp"

#include <algorithm>
#include <fstream>

#include "chemreward/hash.hpp"
#include "chemreward/text.hpp"

namespace chemreward {

namespace {

constexpr std::string_view kMagic = "CRSTORE\n";
constexpr std::uint32_t kFormatVersion = 1;

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(std::string_view s) { out_.append(s); }
  std::string& data() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(in_[pos_++]);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  std::string str() {
    const auto n = u32();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::string_view raw(std::size_t n) {
    need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw Error("store_format", "store file is truncated");
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

ExampleStore ExampleStore::build(std::span<const LabeledMolecule> rows, int radius, int width,
                                 StoreBuildReport* report) {
  ExampleStore store;
  store.radius_ = radius;
  store.width_ = width;
  store.hash_version_ = std::string(kHashVersion);
  StoreBuildReport local;
  for (const auto& row : rows) {
    try {
      auto graph = parse_smiles(row.smiles);
      ExampleRecord rec;
      rec.ordinal = store.records_.size();
      rec.smiles = row.smiles;
      rec.label = row.label;
      rec.task = row.task;
      rec.fingerprint = morgan_fingerprint(graph, radius, width);
      store.records_.push_back(std::move(rec));
    } catch (const SmilesError& e) {
      ++local.skipped;
      local.skipped_reasons.push_back(row.smiles + ": " + e.what());
    }
  }
  local.accepted = store.records_.size();
  if (report) *report = local;
  if (store.records_.empty()) throw Error("empty_dataset", "no usable rows for the example store");
  store.index();
  return store;
}

void ExampleStore::index() {
  task_index_.clear();
  for (std::size_t i = 0; i < records_.size(); ++i) task_index_[records_[i].task].push_back(i);
}

std::vector<std::string> ExampleStore::tasks() const {
  std::vector<std::string> out;
  for (const auto& [task, _] : task_index_) out.push_back(task);
  return out;
}

std::string ExampleStore::serialize() const {
  Writer w;
  w.raw(kMagic);
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(radius_));
  w.u32(static_cast<std::uint32_t>(width_));
  w.str(hash_version_);
  w.u64(records_.size());
  for (const auto& r : records_) {
    w.u64(r.ordinal);
    w.u8(r.label ? 1 : 0);
    w.str(r.task);
    w.str(r.smiles);
    for (auto word : r.fingerprint.words) w.u64(word);
  }
  w.u64(fnv1a64(w.data()));
  return std::move(w.data());
}

ExampleStore ExampleStore::deserialize(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + 8 || bytes.substr(0, kMagic.size()) != kMagic) {
    throw Error("store_format", "not an example store file");
  }
  const auto body = bytes.substr(0, bytes.size() - 8);
  Reader tail(bytes.substr(bytes.size() - 8));
  if (tail.u64() != fnv1a64(body)) throw Error("store_format", "store checksum mismatch");

  Reader r(body);
  r.raw(kMagic.size());
  if (auto v = r.u32(); v != kFormatVersion) {
    throw Error("store_incompatible", "unsupported store format version " + std::to_string(v));
  }
  ExampleStore store;
  store.radius_ = static_cast<int>(r.u32());
  store.width_ = static_cast<int>(r.u32());
  store.hash_version_ = r.str();
  if (store.hash_version_ != kHashVersion) {
    throw Error("store_incompatible",
                "store hashed with " + store.hash_version_ + ", engine uses " + std::string(kHashVersion));
  }
  if (store.width_ <= 0 || store.width_ % 64 != 0) throw Error("store_format", "bad fingerprint width");
  const auto count = r.u64();
  const auto words = static_cast<std::size_t>(store.width_ / 64);
  for (std::uint64_t i = 0; i < count; ++i) {
    ExampleRecord rec;
    rec.ordinal = r.u64();
    rec.label = r.u8() != 0;
    rec.task = r.str();
    rec.smiles = r.str();
    rec.fingerprint = Fingerprint(store.radius_, store.width_);
    for (std::size_t k = 0; k < words; ++k) rec.fingerprint.words[k] = r.u64();
    store.records_.push_back(std::move(rec));
  }
  if (r.remaining() != 0) throw Error("store_format", "trailing bytes in store file");
  store.index();
  return store;
}

void ExampleStore::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io_error", "cannot write " + path);
  const auto bytes = serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("io_error", "write failed for " + path);
}

ExampleStore ExampleStore::load(const std::string& path) { return deserialize(text::read_file(path)); }

std::vector<RetrievalHit> ExampleStore::top_k(const MoleculeGraph& query, int k, std::string_view task) const {
  if (k < 1) throw Error("invalid_argument", "k must be >= 1");
  auto it = task_index_.find(std::string(task));
  if (it == task_index_.end()) throw Error("unknown_task", "task '" + std::string(task) + "' is not in the store");

  const auto fp = morgan_fingerprint(query, radius_, width_);
  std::vector<RetrievalHit> hits;
  hits.reserve(it->second.size());
  for (std::size_t idx : it->second) {
    const double sim = tanimoto(fp, records_[idx].fingerprint);
    // Isomorphic graphs always have identical fingerprints, so only a
    // perfect score needs the full check.
    if (sim == 1.0 && isomorphic(parse_smiles(records_[idx].smiles), query)) continue;
    hits.push_back({idx, sim});
  }
  const auto n = std::min(hits.size(), static_cast<std::size_t>(k));
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(),
                    [&](const RetrievalHit& a, const RetrievalHit& b) {
                      if (a.similarity != b.similarity) return a.similarity > b.similarity;
                      return records_[a.record].ordinal < records_[b.record].ordinal;
                    });
  hits.resize(n);
  return hits;
}

}  // namespace chemreward
