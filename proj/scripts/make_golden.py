#!/usr/bin/env python3
"""Generate the frozen golden corpora for the FIX codec, the market-data
binary codec, the seeded random-number streams, and the order scheduler.

This script is the independent oracle: it assembles wire bytes with its own
arithmetic (byte summing, struct packing) and never links against the C++
implementation. Run once, commit the outputs; the C++ tests then verify the
implementation against these frozen bytes.

Usage: python3 scripts/make_golden.py [output_root]
Default output root: tests/golden
"""

import calendar
import math
import os
import struct
import sys

SOH = b"\x01"


# ---------------------------------------------------------------------------
# FIX assembly


def fix_checksum(data: bytes) -> int:
    return sum(data) % 256


def build_fix(fields, *, forced_bodylen=None, begin="FIX.4.2", forced_checksum=None,
              header_order_standard=True):
    """Assemble a FIX wire from (tag, value) pairs (excluding 8, 9, 10).

    fields[0] must be (35, ...) when header_order_standard; otherwise the
    caller supplies the raw post-BeginString sequence verbatim (used for
    deliberately broken headers).
    """
    body = b"".join(str(t).encode() + b"=" + v.encode() + SOH for t, v in fields)
    bodylen = len(body) if forced_bodylen is None else forced_bodylen
    head = b"8=" + begin.encode() + SOH + b"9=" + str(bodylen).encode() + SOH
    pre_trailer = head + body
    csum = fix_checksum(pre_trailer) if forced_checksum is None else forced_checksum
    return pre_trailer + b"10=" + ("%03d" % csum).encode() + SOH


def fields_with_bodylen(fields, begin="FIX.4.2"):
    """The parsed field view of a wire built by build_fix: 8, 9, then fields."""
    body = b"".join(str(t).encode() + b"=" + v.encode() + SOH for t, v in fields)
    return [(8, begin), (9, str(len(body)))] + list(fields)


TS = "20260819-12:00:00.000"


def make_fix_corpus(outdir):
    os.makedirs(outdir, exist_ok=True)

    # Contribution arithmetic sanity check for the checksum rule.
    assert fix_checksum(b"A\x01") == 66

    valid = {
        "logon.wire": [
            (35, "A"), (49, "CLNT1"), (56, "EXCH"), (34, "1"), (52, TS),
            (98, "0"), (108, "30"),
        ],
        "heartbeat.wire": [
            (35, "0"), (49, "CLNT1"), (56, "EXCH"), (34, "2"), (52, TS),
        ],
        "logout.wire": [
            (35, "5"), (49, "CLNT1"), (56, "EXCH"), (34, "9"), (52, TS),
        ],
        "new_order_single.wire": [
            (35, "D"), (49, "CLNT1"), (56, "EXCH"), (34, "3"), (52, TS),
            (11, "T01-1"), (55, "XYZ"), (54, "1"), (38, "10"), (44, "150"),
            (40, "2"),
        ],
        "exec_report_new.wire": [
            (35, "8"), (49, "EXCH"), (56, "CLNT1"), (34, "4"), (52, TS),
            (37, "7"), (11, "T01-1"), (17, "12"), (20, "0"), (150, "0"),
            (39, "0"), (55, "XYZ"), (54, "1"), (38, "10"), (44, "150"),
            (32, "0"), (31, "0"), (151, "10"), (14, "0"),
        ],
        "exec_report_fill.wire": [
            (35, "8"), (49, "EXCH"), (56, "CLNT1"), (34, "5"), (52, TS),
            (37, "7"), (11, "T01-1"), (17, "13"), (20, "0"), (150, "2"),
            (39, "2"), (55, "XYZ"), (54, "1"), (38, "10"), (44, "150"),
            (32, "10"), (31, "149"), (151, "0"), (14, "10"),
        ],
        "cancel_request.wire": [
            (35, "F"), (49, "CLNT1"), (56, "EXCH"), (34, "6"), (52, TS),
            (41, "T01-1"), (11, "T01-2"), (55, "XYZ"), (54, "1"),
        ],
        "cancel_reject.wire": [
            (35, "9"), (49, "EXCH"), (56, "CLNT1"), (34, "7"), (52, TS),
            (37, "7"), (11, "T01-2"), (41, "T01-1"), (39, "8"),
            (102, "1"), (58, "unknown order"),
        ],
        "order_status_unsupported.wire": [
            # MsgType H parses fine but the venue classifies it Unsupported.
            (35, "H"), (49, "CLNT1"), (56, "EXCH"), (34, "8"), (52, TS),
            (11, "T01-1"), (55, "XYZ"), (54, "1"),
        ],
    }

    manifest = []
    for name, fields in sorted(valid.items()):
        wire = build_fix(fields)
        with open(os.path.join(outdir, name), "wb") as f:
            f.write(wire)
        full = fields_with_bodylen(fields)
        csum = fix_checksum(wire[:-7])
        spec = ";".join("%d=%s" % (t, v) for t, v in full)
        manifest.append("%s\t%d\t%s" % (name, csum, spec))
    with open(os.path.join(outdir, "valid.manifest"), "w") as f:
        f.write("\n".join(manifest) + "\n")

    # Invalid wires, each with the error class the parser must report.
    base = valid["logon.wire"]
    invalid = {}

    good = build_fix(base)
    true_sum = fix_checksum(good[:-7])
    invalid["bad_checksum.wire"] = (
        build_fix(base, forced_checksum=(true_sum + 1) % 256), "BadChecksum")
    invalid["checksum_zero.wire"] = (
        build_fix(base, forced_checksum=0), "BadChecksum")
    invalid["truncated_trailer.wire"] = (good[:-1], "BadChecksum")
    true_bodylen = len(b"".join(
        str(t).encode() + b"=" + v.encode() + SOH for t, v in base))
    invalid["bodylen_off_by_one.wire"] = (
        build_fix(base, forced_bodylen=true_bodylen + 1), "BadBodyLength")
    invalid["too_short.wire"] = (b"8=FIX", "Malformed")
    invalid["empty_value.wire"] = (build_fix(base + [(58, "")]), "Malformed")
    invalid["alpha_tag.wire"] = (
        build_fix(base[:1] + [("ab", "x")] + base[1:]), "Malformed")
    invalid["tag_zero.wire"] = (
        build_fix(base + [(0, "x")]), "Malformed")
    invalid["wrong_begin_string.wire"] = (build_fix(base, begin="FIX.4.4"), "Malformed")
    invalid["missing_msgtype.wire"] = (build_fix(base[1:]), "Malformed")

    # Header out of order: 35 before 9. Assemble by hand; checksum correct.
    hdr = b"8=FIX.4.2" + SOH + b"35=A" + SOH + b"9=4" + SOH
    invalid["header_order.wire"] = (
        hdr + b"10=" + ("%03d" % fix_checksum(hdr)).encode() + SOH, "Malformed")

    manifest = []
    for name, (wire, kind) in sorted(invalid.items()):
        with open(os.path.join(outdir, name), "wb") as f:
            f.write(wire)
        manifest.append("%s\t%s" % (name, kind))
    with open(os.path.join(outdir, "invalid.manifest"), "w") as f:
        f.write("\n".join(manifest) + "\n")

    # Session golden: Heartbeat, Sender EXCH, Target CLNT1, SeqNum 5.
    wall_s = calendar.timegm((2026, 8, 19, 12, 0, 0))
    wall_us = wall_s * 1_000_000
    hb = build_fix([(35, "0"), (49, "EXCH"), (56, "CLNT1"), (34, "5"), (52, TS)])
    with open(os.path.join(outdir, "session_heartbeat.wire"), "wb") as f:
        f.write(hb)
    with open(os.path.join(outdir, "session.manifest"), "w") as f:
        f.write("session_heartbeat.wire\t%d\tEXCH\tCLNT1\t5\n" % wall_us)

    # The bodylen_off_by_one computation above assumed a fixed head size;
    # verify it really declares actual+1 so the parser reports length, not
    # checksum, failure.
    wire = invalid["bodylen_off_by_one.wire"][0]
    head_end = wire.index(SOH, wire.index(SOH) + 1) + 1
    actual = len(wire) - 7 - head_end
    declared = int(wire.split(SOH)[1].split(b"=")[1])
    assert declared == actual + 1, (declared, actual)


# ---------------------------------------------------------------------------
# Market-data datagrams

MD_MAGIC = b"DBMD"
MD_VERSION = 1


def build_md(seq, send_ts, symbol, bids, asks, last, cum_volume):
    flags = 0
    if bids:
        flags |= 1
    if asks:
        flags |= 2
    if last is not None:
        flags |= 4
    out = MD_MAGIC
    out += struct.pack(">BB", MD_VERSION, flags)
    out += struct.pack(">QQ", seq, send_ts)
    sym = symbol.encode()
    assert len(sym) <= 8
    out += sym + b" " * (8 - len(sym))
    out += struct.pack(">BB", len(bids), len(asks))
    for price, qty in bids:
        out += struct.pack(">II", price, qty)
    for price, qty in asks:
        out += struct.pack(">II", price, qty)
    if last is not None:
        out += struct.pack(">IQ", last[0], last[1])
    out += struct.pack(">Q", cum_volume)
    assert len(out) <= 1200
    return out


def make_md_corpus(outdir):
    os.makedirs(outdir, exist_ok=True)
    ts = calendar.timegm((2026, 8, 19, 12, 0, 0)) * 1_000_000

    cases = {
        "md_empty.bin": dict(seq=1, send_ts=ts, symbol="XYZ", bids=[], asks=[],
                             last=None, cum_volume=0),
        "md_full.bin": dict(seq=42, send_ts=ts + 123456, symbol="XYZ",
                            bids=[(150, 10), (149, 4), (148, 7), (147, 1), (146, 20)],
                            asks=[(151, 3), (152, 8), (153, 2), (154, 11), (155, 5)],
                            last=(150, ts + 120000), cum_volume=317),
        "md_bid_only.bin": dict(seq=7, send_ts=ts + 999, symbol="AB",
                                bids=[(99, 1), (98, 2)], asks=[],
                                last=None, cum_volume=12),
        "md_trade_no_depth.bin": dict(seq=100, send_ts=ts + 5000, symbol="XYZ",
                                      bids=[], asks=[], last=(203, ts + 4000),
                                      cum_volume=55),
    }

    manifest = []
    for name, kw in sorted(cases.items()):
        data = build_md(**kw)
        with open(os.path.join(outdir, name), "wb") as f:
            f.write(data)
        bids = ",".join("%d:%d" % pq for pq in kw["bids"]) or "-"
        asks = ",".join("%d:%d" % pq for pq in kw["asks"]) or "-"
        last = "%d:%d" % kw["last"] if kw["last"] else "-"
        manifest.append("%s|%d|%d|%s|%s|%s|%s|%d" % (
            name, kw["seq"], kw["send_ts"], kw["symbol"], bids, asks, last,
            kw["cum_volume"]))
    with open(os.path.join(outdir, "md.manifest"), "w") as f:
        f.write("\n".join(manifest) + "\n")


# ---------------------------------------------------------------------------
# RNG mirror: an independent MT19937-64 plus the exact distribution
# algorithms the C++ Rng uses, so seeded draw sequences can be frozen.

MASK64 = (1 << 64) - 1


class MT64:
    """Standard 64-bit Mersenne Twister (mt19937_64)."""

    N, M = 312, 156
    MATRIX_A = 0xB5026F5AA96619E9
    UPPER = 0xFFFFFFFF80000000
    LOWER = 0x7FFFFFFF

    def __init__(self, seed):
        self.mt = [0] * self.N
        self.mt[0] = seed & MASK64
        for i in range(1, self.N):
            self.mt[i] = (6364136223846793005 *
                          (self.mt[i - 1] ^ (self.mt[i - 1] >> 62)) + i) & MASK64
        self.mti = self.N

    def next_u64(self):
        if self.mti >= self.N:
            for i in range(self.N):
                x = (self.mt[i] & self.UPPER) | (self.mt[(i + 1) % self.N] & self.LOWER)
                xa = x >> 1
                if x & 1:
                    xa ^= self.MATRIX_A
                self.mt[i] = self.mt[(i + self.M) % self.N] ^ xa
            self.mti = 0
        y = self.mt[self.mti]
        self.mti += 1
        y ^= (y >> 29) & 0x5555555555555555
        y ^= (y << 17) & 0x71D67FFFEDA60000
        y ^= (y << 37) & 0xFFF7EEE000000000
        y ^= y >> 43
        return y & MASK64


def _check_mt64():
    # The C++ standard fixes mt19937_64's 10000th draw from the default seed.
    eng = MT64(5489)
    for _ in range(9999):
        eng.next_u64()
    assert eng.next_u64() == 9981545732273789042


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(base, stream):
    return splitmix64((base ^ splitmix64(stream)) & MASK64)


class RngMirror:
    def __init__(self, seed):
        self.eng = MT64(seed)

    def uniform_int(self, lo, hi):
        if lo >= hi:
            return lo
        span = hi - lo + 1
        limit = MASK64 - MASK64 % span
        while True:
            draw = self.eng.next_u64()
            if draw < limit:
                return lo + draw % span

    def uniform01(self):
        return (self.eng.next_u64() >> 11) * 2.0 ** -53

    def exponential(self, mean):
        return -mean * math.log1p(-self.uniform01())

    def normal_pair(self, mean, sd):
        u1 = self.uniform01()
        u2 = self.uniform01()
        while u1 <= 0.0:
            u1 = self.uniform01()
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        return mean + sd * r * math.cos(theta), mean + sd * r * math.sin(theta)


def make_rng_corpus(outdir):
    os.makedirs(outdir, exist_ok=True)
    _check_mt64()

    lines = []
    for seed in (1, 42, 0xDEADBEEF):
        eng = MT64(seed)
        u64 = [str(eng.next_u64()) for _ in range(8)]
        m = RngMirror(seed)
        uint150 = [str(m.uniform_int(1, 150)) for _ in range(12)]
        m = RngMirror(seed)
        u01 = ["%.17g" % m.uniform01() for _ in range(8)]
        m = RngMirror(seed)
        exp6 = ["%.17g" % m.exponential(6.0) for _ in range(8)]
        m = RngMirror(seed)
        norms = []
        for _ in range(4):
            a, b = m.normal_pair(0.0, 1.0)
            norms += ["%.17g" % a, "%.17g" % b]
        lines.append("%d\t%s\t%s\t%s\t%s\t%s" % (
            seed, ",".join(u64), ",".join(uint150), ",".join(u01),
            ",".join(exp6), ",".join(norms)))
    with open(os.path.join(outdir, "rng.manifest"), "w") as f:
        f.write("\n".join(lines) + "\n")

    with open(os.path.join(outdir, "derive.manifest"), "w") as f:
        for base in (12345, 0xFEEDFACE):
            vals = [str(derive_seed(base, i)) for i in range(8)]
            f.write("%d\t%s\n" % (base, ",".join(vals)))


def make_sched_corpus(outdir):
    os.makedirs(outdir, exist_ok=True)

    def issue_times(start, length, n, mirror):
        gaps = [mirror.exponential(length / n) for _ in range(n + 1)]
        total = sum(gaps)
        out = []
        partial = 0.0
        for i in range(n):
            partial += gaps[i]
            out.append(start + length * (partial / total))
        return out

    lines = []
    for seed, start, length, n in ((987, 0.0, 30.0, 5), (11, 60.0, 30.0, 1),
                                   (2024, 0.0, 30.0, 40)):
        times = issue_times(start, length, n, RngMirror(seed))
        assert all(start <= t < start + length for t in times)
        assert times == sorted(times)
        lines.append("%d\t%.17g\t%.17g\t%d\t%s" % (
            seed, start, length, n, ",".join("%.17g" % t for t in times)))
    with open(os.path.join(outdir, "sched.manifest"), "w") as f:
        f.write("\n".join(lines) + "\n")


def main():
    root = sys.argv[1] if len(sys.argv) > 1 else "tests/golden"
    make_fix_corpus(os.path.join(root, "fix"))
    make_md_corpus(os.path.join(root, "md"))
    make_rng_corpus(os.path.join(root, "rng"))
    make_sched_corpus(os.path.join(root, "sched"))
    print("golden corpora written under", root)


if __name__ == "__main__":
    main()
