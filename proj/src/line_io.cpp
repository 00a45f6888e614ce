#include "commlm/line_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "commlm/error.hpp"

namespace commlm {

namespace {

constexpr unsigned kChunk = 1u << 16;

bool has_gz_suffix(const std::filesystem::path& p) { return p.extension() == ".gz"; }

}  // namespace

struct LineReader::Impl {
  gzFile file = nullptr;
  std::vector<char> buf = std::vector<char>(kChunk);
  std::size_t pos = 0;
  std::size_t len = 0;
  bool eof = false;

  ~Impl() {
    if (file) gzclose(file);
  }

  bool fill(const std::filesystem::path& path) {
    if (eof) return false;
    const int n = gzread(file, buf.data(), kChunk);
    if (n < 0) {
      int code = 0;
      const char* msg = gzerror(file, &code);
      throw DataError("read error in " + path.string() + ": " + msg);
    }
    pos = 0;
    len = static_cast<std::size_t>(n);
    if (n == 0) eof = true;
    return n > 0;
  }
};

LineReader::LineReader(const std::filesystem::path& path) : impl_(std::make_unique<Impl>()), path_(path) {
  impl_->file = gzopen(path.c_str(), "rb");
  if (!impl_->file) throw DataError("cannot open " + path.string());
  gzbuffer(impl_->file, kChunk);
}

LineReader::~LineReader() = default;
LineReader::LineReader(LineReader&&) noexcept = default;
LineReader& LineReader::operator=(LineReader&&) noexcept = default;

bool LineReader::next(std::string& line) {
  line.clear();
  bool got_any = false;
  for (;;) {
    if (impl_->pos == impl_->len && !impl_->fill(path_)) break;
    const char* begin = impl_->buf.data() + impl_->pos;
    const char* end = impl_->buf.data() + impl_->len;
    const char* nl = static_cast<const char*>(std::memchr(begin, '\n', static_cast<std::size_t>(end - begin)));
    got_any = true;
    if (nl) {
      line.append(begin, nl);
      impl_->pos += static_cast<std::size_t>(nl - begin) + 1;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      ++line_number_;
      return true;
    }
    line.append(begin, end);
    impl_->pos = impl_->len;
  }
  if (got_any && !line.empty()) {
    if (line.back() == '\r') line.pop_back();
    ++line_number_;
    return true;
  }
  return false;
}

struct LineWriter::Impl {
  gzFile gz = nullptr;
  std::ofstream plain;

  ~Impl() {
    if (gz) gzclose(gz);
  }
};

LineWriter::LineWriter(const std::filesystem::path& path) : impl_(std::make_unique<Impl>()), path_(path) {
  if (has_gz_suffix(path)) {
    impl_->gz = gzopen(path.c_str(), "wb6");
    if (!impl_->gz) throw DataError("cannot write " + path.string());
  } else {
    impl_->plain.open(path, std::ios::binary | std::ios::trunc);
    if (!impl_->plain) throw DataError("cannot write " + path.string());
  }
}

LineWriter::~LineWriter() = default;
LineWriter::LineWriter(LineWriter&&) noexcept = default;
LineWriter& LineWriter::operator=(LineWriter&&) noexcept = default;

void LineWriter::write_line(std::string_view line) {
  if (impl_->gz) {
    if (!line.empty() && gzwrite(impl_->gz, line.data(), static_cast<unsigned>(line.size())) == 0)
      throw DataError("write error in " + path_.string());
    if (gzputc(impl_->gz, '\n') == -1) throw DataError("write error in " + path_.string());
  } else {
    impl_->plain.write(line.data(), static_cast<std::streamsize>(line.size()));
    impl_->plain.put('\n');
    if (!impl_->plain) throw DataError("write error in " + path_.string());
  }
}

void LineWriter::close() {
  if (!impl_) return;
  if (impl_->gz) {
    const int rc = gzclose(impl_->gz);
    impl_->gz = nullptr;
    if (rc != Z_OK) throw DataError("error closing " + path_.string());
  } else if (impl_->plain.is_open()) {
    impl_->plain.close();
    if (!impl_->plain) throw DataError("error closing " + path_.string());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw DataError("write error in " + path.string());
}

}  // namespace commlm
