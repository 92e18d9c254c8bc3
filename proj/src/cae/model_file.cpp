#include "scb/cae/model_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "scb/common/error.hpp"

namespace scb::cae {

namespace {

constexpr char kMagic[4] = {'S', 'C', 'B', 'M'};

class Writer {
 public:
  std::vector<std::uint8_t> out;

  template <typename U>
  void uint(U v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xffu));
  }
  void u8(std::uint8_t v) { out.push_back(v); }
  void u16(std::uint16_t v) { uint(v, 2); }
  void u32(std::uint32_t v) { uint(v, 4); }
  void i32(std::int32_t v) { uint(static_cast<std::uint32_t>(v), 4); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  }
  void list(const std::vector<int>& v) {
    u32(static_cast<std::uint32_t>(v.size()));
    for (int x : v) i32(x);
  }
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : buf_(b) {}

  std::uint64_t uint(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(buf_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(uint(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(uint(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  float f32() { return std::bit_cast<float>(u32()); }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto s = buf_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::vector<int> list() {
    const std::uint32_t n = u32();
    if (n > 4096) throw Error(Errc::InvalidArgument, "implausible list length in arch descriptor");
    std::vector<int> v;
    for (std::uint32_t i = 0; i < n; ++i) v.push_back(i32());
    return v;
  }
  bool done() const { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n) const {
    if (buf_.size() - pos_ < n) throw Error(Errc::TruncatedPayload, "model file ends early");
  }
  std::span<const std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

template <typename S>
NamedTensor matrix_tensor(std::string name, DType dtype, const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>& m) {
  NamedTensor t;
  t.name = std::move(name);
  t.dtype = dtype;
  t.shape = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
  Writer w;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if constexpr (std::is_same_v<S, float>)
        w.f32(m(r, c));
      else if constexpr (std::is_same_v<S, std::uint16_t>)
        w.u16(m(r, c));
      else
        w.u8(static_cast<std::uint8_t>(m(r, c)));
    }
  t.payload = std::move(w.out);
  return t;
}

template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> tensor_matrix(const NamedTensor& t, DType want) {
  if (t.dtype != want) throw Error(Errc::InvalidArgument, "tensor " + t.name + " has an unexpected dtype");
  if (t.shape.empty() || t.shape.size() > 2) throw Error(Errc::InvalidArgument, "tensor " + t.name + " is not a matrix");
  const Eigen::Index rows = t.shape[0], cols = t.shape.size() == 2 ? t.shape[1] : 1;
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> m(rows, cols);
  Reader rd(t.payload);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      if constexpr (std::is_same_v<S, float>)
        m(r, c) = rd.f32();
      else if constexpr (std::is_same_v<S, std::uint16_t>)
        m(r, c) = rd.u16();
      else
        m(r, c) = static_cast<std::int8_t>(rd.u8());
    }
  return m;
}

void write_arch(Writer& w, const ArchDescriptor& a) {
  w.list(a.conv_filters);
  w.list(a.kernel_sizes);
  w.i32(a.pool);
  w.f32(a.leaky_slope);
  w.i32(a.latent_dim);
  w.list(a.aux_widths);
  w.i32(a.in_channels);
  w.i32(a.in_samples);
}

ArchDescriptor read_arch(Reader& r) {
  ArchDescriptor a;
  a.conv_filters = r.list();
  a.kernel_sizes = r.list();
  a.pool = r.i32();
  a.leaky_slope = r.f32();
  a.latent_dim = r.i32();
  a.aux_widths = r.list();
  a.in_channels = r.i32();
  a.in_samples = r.i32();
  return a;
}

void check_shape(const NamedTensor& t, const Eigen::Index rows, const Eigen::Index cols) {
  const Eigen::Index tc = t.shape.size() == 2 ? t.shape[1] : 1;
  if (t.shape.empty() || static_cast<Eigen::Index>(t.shape[0]) != rows || tc != cols)
    throw Error(Errc::InvalidArgument, "tensor " + t.name + " does not match the arch");
}

}  // namespace

std::size_t dtype_size(DType d) {
  switch (d) {
    case DType::F32: return 4;
    case DType::F16: return 2;
    case DType::I8: return 1;
    case DType::F64: return 8;
  }
  throw Error(Errc::InvalidArgument, "unknown dtype");
}

std::size_t NamedTensor::elements() const {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

NamedTensor NamedTensor::from_f32(std::string name, const Mat<float>& m) {
  return matrix_tensor<float>(std::move(name), DType::F32, m);
}

NamedTensor NamedTensor::from_f16(std::string name, const Mat<std::uint16_t>& m) {
  return matrix_tensor<std::uint16_t>(std::move(name), DType::F16, m);
}

NamedTensor NamedTensor::from_i8(std::string name, const Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>& m,
                                 float scale, std::int32_t zero_point) {
  NamedTensor t = matrix_tensor<std::int8_t>(std::move(name), DType::I8, m);
  t.has_quant = true;
  t.scale = scale;
  t.zero_point = zero_point;
  return t;
}

NamedTensor NamedTensor::from_f64(std::string name, const std::vector<double>& v) {
  NamedTensor t;
  t.name = std::move(name);
  t.dtype = DType::F64;
  t.shape = {static_cast<std::uint32_t>(v.size())};
  Writer w;
  for (double x : v) w.uint(std::bit_cast<std::uint64_t>(x), 8);
  t.payload = std::move(w.out);
  return t;
}

Mat<float> NamedTensor::to_f32() const { return tensor_matrix<float>(*this, DType::F32); }
Mat<std::uint16_t> NamedTensor::to_f16() const { return tensor_matrix<std::uint16_t>(*this, DType::F16); }
Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic> NamedTensor::to_i8() const {
  return tensor_matrix<std::int8_t>(*this, DType::I8);
}

std::vector<double> NamedTensor::to_f64() const {
  if (dtype != DType::F64) throw Error(Errc::InvalidArgument, "tensor " + name + " is not f64");
  Reader rd(payload);
  std::vector<double> v(elements());
  for (double& x : v) x = std::bit_cast<double>(rd.uint(8));
  return v;
}

const NamedTensor* ModelFile::find(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return &t;
  return nullptr;
}

const NamedTensor& ModelFile::at(const std::string& name) const {
  const NamedTensor* t = find(name);
  if (!t) throw Error(Errc::InvalidArgument, "model file has no tensor '" + name + "'");
  return *t;
}

std::vector<std::uint8_t> serialize(const ModelFile& m) {
  Writer w;
  w.bytes(kMagic, 4);
  w.u16(kModelVersion);
  write_arch(w, m.arch);
  w.u32(static_cast<std::uint32_t>(m.tensors.size()));
  for (const auto& t : m.tensors) {
    if (t.name.size() > 0xffff) throw Error(Errc::InvalidArgument, "tensor name too long");
    if (t.payload.size() != t.elements() * dtype_size(t.dtype))
      throw Error(Errc::InvalidArgument, "tensor " + t.name + " payload does not match its shape");
    w.u16(static_cast<std::uint16_t>(t.name.size()));
    w.bytes(t.name.data(), t.name.size());
    w.u8(static_cast<std::uint8_t>(t.dtype));
    w.u8(static_cast<std::uint8_t>(t.shape.size()));
    for (auto d : t.shape) w.u32(d);
    w.u8(t.has_quant ? 1 : 0);
    if (t.has_quant) {
      w.f32(t.scale);
      w.i32(t.zero_point);
    }
    w.bytes(t.payload.data(), t.payload.size());
  }
  return std::move(w.out);
}

ModelFile parse(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw Error(Errc::BadMagic, "not an SCBM model file");
  Reader r(bytes.subspan(4));
  const std::uint16_t version = r.u16();
  if (version != kModelVersion) throw Error(Errc::InvalidArgument, "unsupported model file version " + std::to_string(version));
  ModelFile m;
  m.arch = read_arch(r);
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    const auto name = r.bytes(r.u16());
    t.name.assign(name.begin(), name.end());
    const std::uint8_t dt = r.u8();
    if (dt > static_cast<std::uint8_t>(DType::F64)) throw Error(Errc::InvalidArgument, "unknown dtype tag in " + t.name);
    t.dtype = static_cast<DType>(dt);
    const std::uint8_t rank = r.u8();
    for (std::uint8_t k = 0; k < rank; ++k) t.shape.push_back(r.u32());
    t.has_quant = r.u8() != 0;
    if (t.has_quant) {
      t.scale = r.f32();
      t.zero_point = r.i32();
    }
    const auto payload = r.bytes(t.elements() * dtype_size(t.dtype));
    t.payload.assign(payload.begin(), payload.end());
    m.tensors.push_back(std::move(t));
  }
  if (!r.done()) throw Error(Errc::InvalidArgument, "trailing bytes after the last tensor");
  return m;
}

void write_model_file(const std::filesystem::path& path, const ModelFile& m) {
  const auto bytes = serialize(m);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(Errc::Io, "write failed: " + path.string());
}

ModelFile read_model_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse(bytes);
}

void append_params(ModelFile& m, const CaeParams& p) {
  p.for_each_tensor([&](const std::string& name, const Mat<float>& t, TensorRole) {
    m.tensors.push_back(NamedTensor::from_f32(name, t));
  });
}

bool has_float_params(const ModelFile& m) { return m.find("latent.w") != nullptr; }

CaeParams params_from(const ModelFile& m) {
  CaeParams p = init_params(m.arch, 0);
  p.for_each_tensor([&](const std::string& name, Mat<float>& t, TensorRole) {
    const NamedTensor& nt = m.at(name);
    check_shape(nt, t.rows(), t.cols());
    t = nt.to_f32();
  });
  check_params(p);
  return p;
}

void append_quantized(ModelFile& m, const QuantizedParams& q) {
  if (q.mode == Precision::Fp16) {
    q.half.for_each_tensor([&](const std::string& name, const Mat<std::uint16_t>& t, TensorRole) {
      m.tensors.push_back(NamedTensor::from_f16("fp16." + name, t));
    });
    return;
  }
  for (std::size_t i = 0; i < q.conv_w.size(); ++i) {
    const std::string s = std::to_string(i);
    m.tensors.push_back(NamedTensor::from_i8("int8.enc." + s + ".w", q.conv_w[i].q, q.conv_w[i].scale, 0));
    m.tensors.push_back(NamedTensor::from_f32("int8.enc." + s + ".b", q.conv_b[i]));
  }
  m.tensors.push_back(NamedTensor::from_i8("int8.latent.w", q.latent_w.q, q.latent_w.scale, 0));
  m.tensors.push_back(NamedTensor::from_f32("int8.latent.b", q.latent_b));
  for (std::size_t i = 0; i < q.act.size(); ++i) {
    Mat<float> range(2, 1);
    range << q.act[i].min, q.act[i].max;
    NamedTensor t = NamedTensor::from_f32("int8.act." + std::to_string(i), range);
    t.has_quant = true;
    t.scale = q.act[i].scale;
    t.zero_point = q.act[i].zero_point;
    m.tensors.push_back(std::move(t));
  }
}

std::optional<QuantizedParams> quantized_from(const ModelFile& m) {
  QuantizedParams q;
  q.arch = m.arch;
  if (m.find("fp16.latent.w")) {
    q.mode = Precision::Fp16;
    q.half = init_params(m.arch, 0).cast<std::uint16_t>();
    q.half.for_each_tensor([&](const std::string& name, Mat<std::uint16_t>& t, TensorRole) {
      const NamedTensor& nt = m.at("fp16." + name);
      check_shape(nt, t.rows(), t.cols());
      t = nt.to_f16();
    });
    q.widened = widen(q.half);
    return q;
  }
  if (!m.find("int8.latent.w")) return std::nullopt;
  q.mode = Precision::Int8;
  const CaeParams layout = init_params(m.arch, 0);
  for (int i = 0; i < m.arch.stages(); ++i) {
    const std::string s = std::to_string(i);
    const NamedTensor& w = m.at("int8.enc." + s + ".w");
    check_shape(w, layout.enc[static_cast<std::size_t>(i)].w.rows(), layout.enc[static_cast<std::size_t>(i)].w.cols());
    q.conv_w.push_back({w.to_i8(), w.scale});
    q.conv_b.push_back(m.at("int8.enc." + s + ".b").to_f32());
  }
  const NamedTensor& lw = m.at("int8.latent.w");
  check_shape(lw, layout.latent.w.rows(), layout.latent.w.cols());
  q.latent_w = {lw.to_i8(), lw.scale};
  q.latent_b = m.at("int8.latent.b").to_f32();
  for (int i = 0; i <= m.arch.stages(); ++i) {
    const NamedTensor& t = m.at("int8.act." + std::to_string(i));
    const Mat<float> range = t.to_f32();
    ActQuant a;
    a.min = range(0, 0);
    a.max = range(1, 0);
    a.scale = t.scale;
    a.zero_point = t.zero_point;
    q.act.push_back(a);
  }
  return q;
}

}  // namespace scb::cae
