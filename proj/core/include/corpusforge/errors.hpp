#pragma once

#include <stdexcept>
#include <string>

namespace corpusforge {

/// Base class for all corpusforge errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input stream is neither gzip nor a bare WARC stream.
class UnreadableArchive : public Error {
 public:
  using Error::Error;
};

/// WARC record header is missing the version line or Content-Length.
class MalformedHeader : public Error {
 public:
  using Error::Error;
};

/// Configuration file problem; carries the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& reason)
      : Error("config error [" + key + "]: " + reason), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Resume attempted with a config whose hash differs from the manifest.
class ConfigMismatch : public Error {
 public:
  using Error::Error;
};

/// A stage was invoked before its upstream outputs exist.
class MissingInput : public Error {
 public:
  using Error::Error;
};

/// Text too short to produce a single shingle.
class TooShort : public Error {
 public:
  using Error::Error;
};

/// Signatures built with different (k, n, seed) cannot be compared.
class ParamsMismatch : public Error {
 public:
  using Error::Error;
};

/// Band count times rows per band must equal the signature length.
class BandShapeError : public Error {
 public:
  using Error::Error;
};

/// Verify-mode clustering requires retained shingle sets.
class MissingShingles : public Error {
 public:
  using Error::Error;
};

/// A shard plan references a document absent from the store.
class MissingDocument : public Error {
 public:
  using Error::Error;
};

/// A mix target names a bucket with no stats.
class UnknownBucket : public Error {
 public:
  using Error::Error;
};

/// Bucket contents are inconsistent with its declared stats.
class ExhaustedBucket : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure writing pipeline outputs.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace corpusforge
