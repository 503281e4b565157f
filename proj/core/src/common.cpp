#include "signcurator/common/base64.hpp"
#include "signcurator/common/fs.hpp"
#include "signcurator/common/hash.hpp"
#include "signcurator/common/subprocess.hpp"
#include "signcurator/common/time.hpp"
#include "signcurator/error.hpp"

#include <openssl/evp.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <atomic>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>
#include <system_error>

namespace signcurator {

namespace {

std::string to_hex(const unsigned char* data, std::size_t len) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (std::size_t i = 0; i < len; ++i) {
    out.push_back(digits[data[i] >> 4]);
    out.push_back(digits[data[i] & 0x0f]);
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int digest_len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &digest_len,
                 EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest computation failed");
  }
  return to_hex(digest.data(), digest_len);
}

std::string sha256_hex(std::string_view data) {
  return sha256_hex(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::string sha256_file_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open file for hashing: " + path.string());
  }
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) {
    throw Error("sha256 context allocation failed");
  }
  if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256 digest init failed");
  }
  std::array<char, 65536> buf{};
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    std::streamsize got = in.gcount();
    if (got > 0 &&
        EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(got)) != 1) {
      EVP_MD_CTX_free(ctx);
      throw Error("sha256 digest update failed");
    }
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int digest_len = 0;
  if (EVP_DigestFinal_ex(ctx, digest.data(), &digest_len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256 digest finalization failed");
  }
  EVP_MD_CTX_free(ctx);
  return to_hex(digest.data(), digest_len);
}

std::string to_rfc3339(Timestamp ts) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(
      std::chrono::floor<std::chrono::seconds>(ts));
  std::tm tm_utc{};
  if (gmtime_r(&secs, &tm_utc) == nullptr) {
    throw Error("timestamp out of representable range");
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm_utc.tm_year + 1900, tm_utc.tm_mon + 1, tm_utc.tm_mday,
                tm_utc.tm_hour, tm_utc.tm_min, tm_utc.tm_sec);
  return buf;
}

Timestamp parse_rfc3339(std::string_view text) {
  // Accepts "YYYY-MM-DDTHH:MM:SSZ" with optional fractional seconds
  // (fractions are truncated) and either 'Z' or a +HH:MM / -HH:MM offset.
  std::tm tm{};
  int consumed = 0;
  const std::string s(text);
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &tm.tm_year,
                  &tm.tm_mon, &tm.tm_mday, &tm.tm_hour, &tm.tm_min,
                  &tm.tm_sec, &consumed) != 6) {
    throw ParseError("invalid RFC 3339 timestamp: " + s);
  }
  // timegm would silently normalize out-of-range fields (month 13, hour 25).
  static const int kDaysInMonth[12] = {31, 28, 31, 30, 31, 30,
                                       31, 31, 30, 31, 30, 31};
  const int year = tm.tm_year;
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  const bool month_ok = tm.tm_mon >= 1 && tm.tm_mon <= 12;
  const int days_in_month =
      month_ok ? kDaysInMonth[tm.tm_mon - 1] + (tm.tm_mon == 2 && leap ? 1 : 0)
               : 0;
  if (!month_ok || tm.tm_mday < 1 || tm.tm_mday > days_in_month ||
      tm.tm_hour < 0 || tm.tm_hour > 23 || tm.tm_min < 0 || tm.tm_min > 59 ||
      tm.tm_sec < 0 || tm.tm_sec > 60) {
    throw ParseError("RFC 3339 field out of range: " + s);
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  std::size_t pos = static_cast<std::size_t>(consumed);
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      ++pos;
    }
  }
  long offset_seconds = 0;
  if (pos >= s.size()) {
    throw ParseError("RFC 3339 timestamp missing timezone: " + s);
  }
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    int oh = 0;
    int om = 0;
    int sign = s[pos] == '+' ? 1 : -1;
    if (std::sscanf(s.c_str() + pos + 1, "%2d:%2d", &oh, &om) != 2 || oh < 0 ||
        oh > 23 || om < 0 || om > 59) {
      throw ParseError("invalid RFC 3339 timezone offset: " + s);
    }
    offset_seconds = sign * (oh * 3600L + om * 60L);
    pos += 6;
  } else {
    throw ParseError("invalid RFC 3339 timezone designator: " + s);
  }
  if (pos != s.size()) {
    throw ParseError("trailing characters in RFC 3339 timestamp: " + s);
  }
  const std::time_t utc = timegm(&tm) - offset_seconds;
  return std::chrono::system_clock::from_time_t(utc);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open file: " + path.string());
  }
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) {
    throw IoError("read failed: " + path.string());
  }
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  const auto parent = path.parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec) {
      throw IoError("cannot create directory " + parent.string() + ": " +
                    ec.message());
    }
  }
  static std::atomic<unsigned long> write_counter{0};
  const std::filesystem::path tmp =
      path.string() + ".tmp." + std::to_string(::getpid()) + "." +
      std::to_string(write_counter.fetch_add(1, std::memory_order_relaxed));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open temp file: " + tmp.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot replace " + path.string() + ": " + ec.message());
  }
}

void append_line(const std::filesystem::path& path, std::string_view line) {
  const auto parent = path.parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec) {
      throw IoError("cannot create directory " + parent.string() + ": " +
                    ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) {
    throw IoError("cannot open for append: " + path.string());
  }
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.put('\n');
  out.flush();
  if (!out) {
    throw IoError("append failed: " + path.string());
  }
}

namespace {

constexpr char kBase64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int base64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t v =
        (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(kBase64Alphabet[(v >> 18) & 0x3f]);
    out.push_back(kBase64Alphabet[(v >> 12) & 0x3f]);
    out.push_back(kBase64Alphabet[(v >> 6) & 0x3f]);
    out.push_back(kBase64Alphabet[v & 0x3f]);
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out.push_back(kBase64Alphabet[(v >> 18) & 0x3f]);
    out.push_back(kBase64Alphabet[(v >> 12) & 0x3f]);
    out.push_back('=');
    out.push_back('=');
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(kBase64Alphabet[(v >> 18) & 0x3f]);
    out.push_back(kBase64Alphabet[(v >> 12) & 0x3f]);
    out.push_back(kBase64Alphabet[(v >> 6) & 0x3f]);
    out.push_back('=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) {
    throw ParseError("base64 length must be a multiple of 4");
  }
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int values[4];
    int padding = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=') {
        if (i + 4 != text.size() || k < 2) {
          throw ParseError("misplaced base64 padding");
        }
        values[k] = 0;
        ++padding;
      } else {
        if (padding > 0) {
          throw ParseError("base64 data after padding");
        }
        values[k] = base64_value(c);
        if (values[k] < 0) {
          throw ParseError(std::string("invalid base64 character: '") + c +
                           "'");
        }
      }
    }
    const std::uint32_t v = (values[0] << 18) | (values[1] << 12) |
                            (values[2] << 6) | values[3];
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    if (padding < 2) {
      out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    }
    if (padding < 1) {
      out.push_back(static_cast<std::uint8_t>(v & 0xff));
    }
  }
  return out;
}

CommandResult run_shell_command(const std::string& command) {
  char stderr_template[] = "/tmp/signcurator_stderr_XXXXXX";
  const int fd = mkstemp(stderr_template);
  if (fd < 0) {
    throw IoError(std::string("cannot create temp file: ") +
                  std::strerror(errno));
  }
  close(fd);
  const std::string stderr_path = stderr_template;
  // Child stdout is discarded so subprocess chatter cannot interleave with
  // reports the caller prints to its own stdout.
  const std::string full = "( " + command + " ) >/dev/null 2>" + stderr_path;
  const int status = std::system(full.c_str());
  CommandResult result;
  if (status == -1) {
    std::filesystem::remove(stderr_path);
    throw IoError(std::string("cannot spawn shell: ") + std::strerror(errno));
  }
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.exit_code = 128 + WTERMSIG(status);
  }
  try {
    result.stderr_text = read_file(stderr_path);
  } catch (const IoError&) {
    result.stderr_text.clear();
  }
  std::filesystem::remove(stderr_path);
  return result;
}

}  // namespace signcurator
