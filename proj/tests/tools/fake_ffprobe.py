#!/usr/bin/env python3
"""Minimal ffprobe-compatible prober for GRV1 files (and WAV duration)."""
import json
import struct
import sys


def probe_grv(path):
    with open(path, "rb") as fh:
        if fh.readline().strip() != b"GRV1":
            sys.exit("fake_ffprobe: not a GRV1 file: %s" % path)
        header = json.loads(fh.readline())
    fps = header["fps_num"] / header["fps_den"]
    duration = header["frame_count"] / fps
    return {
        "streams": [{
            "width": header["width"],
            "height": header["height"],
            "r_frame_rate": "%d/%d" % (header["fps_num"], header["fps_den"]),
            "nb_frames": str(header["frame_count"]),
        }],
        "format": {"duration": "%.6f" % duration},
    }


def probe_wav(path):
    with open(path, "rb") as fh:
        fh.seek(24)
        rate = struct.unpack("<I", fh.read(4))[0]
        fh.seek(40)
        nbytes = struct.unpack("<I", fh.read(4))[0]
    duration = nbytes / (rate * 2.0)
    # No video stream; report a 1x1 1fps placeholder so duration probing works.
    return {
        "streams": [{"width": 1, "height": 1, "r_frame_rate": "1/1",
                     "nb_frames": str(int(round(duration)))}],
        "format": {"duration": "%.6f" % duration},
    }


def main(argv):
    path = argv[-1]
    doc = probe_wav(path) if path.endswith(".wav") else probe_grv(path)
    json.dump(doc, sys.stdout)


if __name__ == "__main__":
    main(sys.argv)
