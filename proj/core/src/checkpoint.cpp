#include "evosteer/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "evosteer/errors.hpp"

namespace evosteer {

namespace {

constexpr char kMagic[4] = {'E', 'V', 'S', 'T'};

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw CheckpointError("checkpoint: truncated file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw CheckpointError("checkpoint: truncated file");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

Activation activation_from_code(double code) {
  if (code == 0.0) return Activation::tanh_fn;
  if (code == 1.0) return Activation::relu;
  throw CheckpointError("checkpoint: unknown activation code");
}

double activation_code(Activation act) {
  return act == Activation::tanh_fn ? 0.0 : 1.0;
}

}  // namespace

std::size_t NamedTensor::element_count() const {
  std::size_t n = 1;
  for (std::uint32_t d : dims) n *= d;
  return n;
}

const NamedTensor& TensorFile::find(const std::string& name) const {
  for (const NamedTensor& t : tensors)
    if (t.name == name) return t;
  throw CheckpointError("checkpoint: missing tensor '" + name + "'");
}

bool TensorFile::contains(const std::string& name) const {
  for (const NamedTensor& t : tensors)
    if (t.name == name) return true;
  return false;
}

void write_tensor_file(const std::string& path, const TensorFile& file) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("checkpoint: cannot open '" + path + "' for writing");
  out.write(kMagic, 4);
  put_u32(out, file.format_version);
  put_u32(out, file.action_dim);
  put_u32(out, file.context_dim);
  put_u32(out, file.steps);
  put_f64(out, file.beta_start);
  put_f64(out, file.beta_end);
  put_u32(out, static_cast<std::uint32_t>(file.tensors.size()));
  for (const NamedTensor& t : file.tensors) {
    put_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put_u32(out, static_cast<std::uint32_t>(t.dims.size()));
    for (std::uint32_t d : t.dims) put_u32(out, d);
    if (t.data.size() != t.element_count())
      throw CheckpointError("checkpoint: tensor '" + t.name + "' data/dims mismatch");
    for (double v : t.data) put_f64(out, v);
  }
  if (!out) throw CheckpointError("checkpoint: write failure on '" + path + "'");
}

TensorFile read_tensor_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint: cannot open '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw CheckpointError("checkpoint: bad magic in '" + path + "' (expected \"EVST\")");
  TensorFile file;
  file.format_version = get_u32(in);
  if (file.format_version != kCheckpointFormatVersion)
    throw CheckpointError("checkpoint: unsupported format version " +
                          std::to_string(file.format_version) + " (expected " +
                          std::to_string(kCheckpointFormatVersion) + ")");
  file.action_dim = get_u32(in);
  file.context_dim = get_u32(in);
  file.steps = get_u32(in);
  file.beta_start = get_f64(in);
  file.beta_end = get_f64(in);
  const std::uint32_t count = get_u32(in);
  file.tensors.resize(count);
  for (NamedTensor& t : file.tensors) {
    const std::uint32_t name_len = get_u32(in);
    if (name_len > 4096) throw CheckpointError("checkpoint: unreasonable tensor name length");
    t.name.resize(name_len);
    in.read(t.name.data(), name_len);
    if (!in) throw CheckpointError("checkpoint: truncated file");
    const std::uint32_t rank = get_u32(in);
    if (rank > 8) throw CheckpointError("checkpoint: unreasonable tensor rank");
    t.dims.resize(rank);
    for (std::uint32_t& d : t.dims) d = get_u32(in);
    t.data.resize(t.element_count());
    for (double& v : t.data) v = get_f64(in);
  }
  return file;
}

void save_model(const std::string& path, const DenoiserModel& model) {
  TensorFile file;
  file.action_dim = static_cast<std::uint32_t>(model.action_dim);
  file.context_dim = static_cast<std::uint32_t>(model.context_dim);
  file.steps = static_cast<std::uint32_t>(model.schedule.steps);
  file.beta_start = model.schedule.beta_start;
  file.beta_end = model.schedule.beta_end;

  file.tensors.push_back({"time_embed_width",
                          {1},
                          {static_cast<double>(model.time_embed_width)}});
  const Mlp& mlp = model.mlp;
  for (int l = 0; l < mlp.layer_count(); ++l) {
    const std::string prefix = "layer" + std::to_string(l);
    const Mat& w = mlp.weights[l];
    file.tensors.push_back({prefix + ".weight",
                            {static_cast<std::uint32_t>(w.rows),
                             static_cast<std::uint32_t>(w.cols)},
                            w.data});
    file.tensors.push_back({prefix + ".bias",
                            {static_cast<std::uint32_t>(mlp.biases[l].size())},
                            mlp.biases[l]});
    if (l + 1 < mlp.layer_count())
      file.tensors.push_back({prefix + ".act", {1}, {activation_code(mlp.hidden_act[l])}});
  }
  write_tensor_file(path, file);
}

DenoiserModel load_model(const std::string& path) {
  const TensorFile file = read_tensor_file(path);
  if (file.steps == 0)
    throw CheckpointError("checkpoint: '" + path + "' holds a demo dataset, not a model");

  DenoiserModel model;
  model.action_dim = static_cast<int>(file.action_dim);
  model.context_dim = static_cast<int>(file.context_dim);
  model.time_embed_width = static_cast<int>(file.find("time_embed_width").data.at(0));
  model.schedule =
      make_schedule(static_cast<int>(file.steps), file.beta_start, file.beta_end);

  Mlp& mlp = model.mlp;
  for (int l = 0;; ++l) {
    const std::string prefix = "layer" + std::to_string(l);
    if (!file.contains(prefix + ".weight")) break;
    const NamedTensor& wt = file.find(prefix + ".weight");
    if (wt.dims.size() != 2) throw CheckpointError("checkpoint: weight tensor must be rank 2");
    Mat w(static_cast<int>(wt.dims[0]), static_cast<int>(wt.dims[1]));
    w.data = wt.data;
    mlp.weights.push_back(std::move(w));
    mlp.biases.push_back(file.find(prefix + ".bias").data);
    if (file.contains(prefix + ".act"))
      mlp.hidden_act.push_back(activation_from_code(file.find(prefix + ".act").data.at(0)));
  }
  if (mlp.weights.empty()) throw CheckpointError("checkpoint: no layers found");
  mlp.sizes.push_back(mlp.weights.front().cols);
  for (const Mat& w : mlp.weights) mlp.sizes.push_back(w.rows);
  if (mlp.hidden_act.size() + 1 != mlp.weights.size())
    throw CheckpointError("checkpoint: layer/activation count mismatch");

  const int expected_input = model.action_dim + model.context_dim + model.time_embed_width;
  if (mlp.input_size() != expected_input || mlp.output_size() != model.action_dim)
    throw CheckpointError("checkpoint: layer dims inconsistent with header");
  return model;
}

void save_demos(const std::string& path, const std::vector<Demo>& demos) {
  if (demos.empty()) throw Error("save_demos: empty demos");
  TensorFile file;
  const std::uint32_t n = static_cast<std::uint32_t>(demos.size());
  file.action_dim = static_cast<std::uint32_t>(demos.front().action.size());
  file.context_dim = static_cast<std::uint32_t>(demos.front().context.size());
  file.steps = 0;  // marks a dataset container

  NamedTensor contexts{"contexts", {n, file.context_dim}, {}};
  NamedTensor actions{"actions", {n, file.action_dim}, {}};
  for (const Demo& d : demos) {
    contexts.data.insert(contexts.data.end(), d.context.begin(), d.context.end());
    actions.data.insert(actions.data.end(), d.action.begin(), d.action.end());
  }
  file.tensors.push_back(std::move(contexts));
  file.tensors.push_back(std::move(actions));
  write_tensor_file(path, file);
}

std::vector<Demo> load_demos(const std::string& path) {
  const TensorFile file = read_tensor_file(path);
  if (file.steps != 0)
    throw CheckpointError("checkpoint: '" + path + "' holds a model, not a demo dataset");
  const NamedTensor& contexts = file.find("contexts");
  const NamedTensor& actions = file.find("actions");
  if (contexts.dims.size() != 2 || actions.dims.size() != 2 ||
      contexts.dims[0] != actions.dims[0])
    throw CheckpointError("checkpoint: malformed demo dataset");
  const std::uint32_t n = contexts.dims[0];
  const std::uint32_t cdim = contexts.dims[1];
  const std::uint32_t adim = actions.dims[1];
  std::vector<Demo> demos(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    demos[i].context.assign(contexts.data.begin() + i * cdim,
                            contexts.data.begin() + (i + 1) * cdim);
    demos[i].action.assign(actions.data.begin() + i * adim,
                           actions.data.begin() + (i + 1) * adim);
  }
  return demos;
}

}  // namespace evosteer
