"""Binary model files for RandomForestLinker.

Layout (little-endian)::

    8s   magic  b"RFLINK\\x00\\x01"
    H    format major version
    H    format minor version
    I    n_trees
    I    max_features (features tried per split)
    I    n_features
    I    min_samples_leaf
    q    seed
    H    length L of the feature-order id, then L bytes ASCII
    d    oob error (NaN if undefined)
    d*n_features   Gini importance
    per tree:
        I    n_nodes
        n_nodes records of <i4 feature, <f8 threshold, <f8 neg, <f8 pos>
        in pre-order; feature -1 marks a leaf.  A node's left child is the
        next record; its right child follows the left subtree.
    I    CRC-32 of every preceding byte

Readers accept any minor version of their major version.
"""

import struct
import zlib

import numpy as np

from .exceptions import ModelError
from .forest import LEAF, DecisionTree, RandomForestLinker

MAGIC = b"RFLINK\x00\x01"
FORMAT_MAJOR = 1
FORMAT_MINOR = 0

_HEADER = struct.Struct("<8sHHIIIIq")
_NODE = np.dtype([("feature", "<i4"), ("threshold", "<f8"), ("neg", "<f8"), ("pos", "<f8")])


def dumps(forest, feature_order_id):
    parts = [
        _HEADER.pack(MAGIC, FORMAT_MAJOR, FORMAT_MINOR, len(forest.estimators_),
                     int(forest.max_features), int(forest.n_features_in_),
                     int(forest.min_samples_leaf), int(forest.seed_)),
    ]
    fid = feature_order_id.encode("ascii")
    parts.append(struct.pack("<H", len(fid)) + fid)
    parts.append(struct.pack("<d", forest.oob_error_))
    parts.append(np.asarray(forest.gini_importance_, dtype="<f8").tobytes())
    for tree in forest.estimators_:
        rec = np.empty(tree.node_count, dtype=_NODE)
        rec["feature"] = tree.feature
        rec["threshold"] = np.where(tree.feature == LEAF, 0.0, tree.threshold)
        rec["neg"] = tree.value[:, 0]
        rec["pos"] = tree.value[:, 1]
        parts.append(struct.pack("<I", tree.node_count) + rec.tobytes())
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


def _children(feature):
    n = len(feature)
    left = np.full(n, LEAF, dtype=np.int32)
    right = np.full(n, LEAF, dtype=np.int32)
    pending = []
    for i in range(n):
        if i > 0:
            if feature[i - 1] != LEAF:
                left[i - 1] = i
            else:
                if not pending:
                    raise ModelError("corrupt model file: malformed tree layout")
                right[pending.pop()] = i
        if feature[i] != LEAF:
            pending.append(i)
    if pending:
        raise ModelError("corrupt model file: malformed tree layout")
    return left, right


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, n):
        if self.pos + n > len(self.data):
            raise ModelError("model file is truncated")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt):
        s = struct.Struct(fmt)
        return s.unpack(self.take(s.size))


def loads(data, expected_feature_order=None):
    """Rebuild a fitted forest from ``dumps`` output.

    Returns ``(forest, feature_order_id)``.  Raises ``ModelError`` on bad
    magic, unsupported version, truncation, checksum mismatch, or when
    ``expected_feature_order`` is given and differs from the file's.
    """
    if data[:len(MAGIC)] != MAGIC[:len(data)] or len(data) < len(MAGIC):
        if len(data) >= len(MAGIC) or not MAGIC.startswith(data):
            raise ModelError("not a model file (bad magic bytes)")
    if len(data) < _HEADER.size + 4:
        raise ModelError("model file is truncated")
    r = _Reader(data)
    _, major, minor, n_trees, m_try, n_features, min_leaf, seed = r.unpack(_HEADER.format)
    if major != FORMAT_MAJOR:
        raise ModelError(
            f"model format version {major}.{minor} is not supported "
            f"(this build reads {FORMAT_MAJOR}.x)")
    (crc,) = struct.unpack("<I", data[-4:])
    if zlib.crc32(data[:-4]) != crc:
        raise ModelError("model file is corrupt or truncated (checksum mismatch)")
    r.data = data[:-4]
    (flen,) = r.unpack("<H")
    try:
        feature_order_id = r.take(flen).decode("ascii")
    except UnicodeDecodeError:
        raise ModelError("corrupt model file: feature-order id") from None
    if expected_feature_order is not None and feature_order_id != expected_feature_order:
        raise ModelError(
            f"model feature-order version {feature_order_id!r} does not match "
            f"this build's {expected_feature_order!r}; retrain the model")
    (oob,) = r.unpack("<d")
    importance = np.frombuffer(r.take(8 * n_features), dtype="<f8").astype(np.float64)
    trees = []
    for _ in range(n_trees):
        (n_nodes,) = r.unpack("<I")
        if n_nodes == 0:
            raise ModelError("corrupt model file: empty tree")
        rec = np.frombuffer(r.take(_NODE.itemsize * n_nodes), dtype=_NODE)
        feature = rec["feature"].astype(np.int32)
        if np.any((feature < LEAF) | (feature >= n_features)):
            raise ModelError("corrupt model file: feature index out of range")
        left, right = _children(feature)
        value = np.column_stack((rec["neg"], rec["pos"])).astype(np.float64)
        trees.append(DecisionTree(feature, rec["threshold"].astype(np.float64), left, right, value))
    if r.pos != len(r.data):
        raise ModelError("corrupt model file: trailing bytes")

    forest = RandomForestLinker(n_estimators=n_trees, max_features=m_try,
                                min_samples_leaf=min_leaf, random_state=seed)
    forest.estimators_ = trees
    forest.seed_ = seed
    forest.oob_error_ = oob
    forest.gini_importance_ = importance
    forest.n_features_in_ = n_features
    forest.classes_ = np.array([0, 1])
    forest.feature_order_id_ = feature_order_id
    return forest, feature_order_id


def save(forest, path, feature_order_id):
    with open(path, "wb") as fh:
        fh.write(dumps(forest, feature_order_id))


def load(path, expected_feature_order=None):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ModelError(f"cannot read model file {path}: {exc.strerror}") from None
    return loads(data, expected_feature_order)
