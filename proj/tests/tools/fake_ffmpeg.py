#!/usr/bin/env python3
"""Minimal FFmpeg-CLI-compatible transcoder for the GRV1 raw gray container.

Supports the argument subset the pipeline emits:
  decode:  [-ss S -t D] -i in.grv [-vf scale=W:-1] -f rawvideo -pix_fmt gray pipe:1
  extract: -y -ss S -t D -i in.grv (-an out.grv | -vn out.wav)
"""
import json
import math
import struct
import sys


def read_grv(path):
    with open(path, "rb") as fh:
        magic = fh.readline().strip()
        if magic != b"GRV1":
            sys.exit("fake_ffmpeg: not a GRV1 file: %s" % path)
        header = json.loads(fh.readline())
        w, h = header["width"], header["height"]
        n = header["frame_count"]
        frames = [fh.read(w * h) for _ in range(n)]
    return header, frames


def scaled_dims(w, h, target_w):
    return target_w, max(1, (h * target_w + w // 2) // w)


def resize_bilinear(frame, w, h, ow, oh):
    if (ow, oh) == (w, h):
        return frame
    out = bytearray(ow * oh)
    for oy in range(oh):
        fy = (oy + 0.5) * h / oh - 0.5
        y0 = max(0, min(h - 1, int(math.floor(fy))))
        y1 = min(h - 1, y0 + 1)
        wy = fy - y0
        for ox in range(ow):
            fx = (ox + 0.5) * w / ow - 0.5
            x0 = max(0, min(w - 1, int(math.floor(fx))))
            x1 = min(w - 1, x0 + 1)
            wx = fx - x0
            v = (frame[y0 * w + x0] * (1 - wx) * (1 - wy)
                 + frame[y0 * w + x1] * wx * (1 - wy)
                 + frame[y1 * w + x0] * (1 - wx) * wy
                 + frame[y1 * w + x1] * wx * wy)
            out[oy * ow + ox] = max(0, min(255, int(round(v))))
    return bytes(out)


def write_wav(path, seconds, rate=8000):
    n = int(round(seconds * rate))
    data = b"\x00\x00" * n
    with open(path, "wb") as fh:
        fh.write(b"RIFF")
        fh.write(struct.pack("<I", 36 + len(data)))
        fh.write(b"WAVEfmt ")
        fh.write(struct.pack("<IHHIIHH", 16, 1, 1, rate, rate * 2, 2, 16))
        fh.write(b"data")
        fh.write(struct.pack("<I", len(data)))
        fh.write(data)


def main(argv):
    args = argv[1:]
    ss = None
    dur = None
    inp = None
    scale_w = None
    out_path = None
    mode = "decode"
    i = 0
    while i < len(args):
        a = args[i]
        if a in ("-v", "-pix_fmt", "-f"):
            i += 2
        elif a == "-y":
            i += 1
        elif a == "-ss":
            ss = float(args[i + 1]); i += 2
        elif a == "-t":
            dur = float(args[i + 1]); i += 2
        elif a == "-i":
            inp = args[i + 1]; i += 2
        elif a == "-vf":
            flt = args[i + 1]
            if flt.startswith("scale="):
                scale_w = int(flt.split("=")[1].split(":")[0])
            i += 2
        elif a == "-an":
            mode = "video_out"; i += 1
        elif a == "-vn":
            mode = "audio_out"; i += 1
        elif a == "pipe:1":
            mode = "decode"; i += 1
        elif not a.startswith("-"):
            out_path = a; i += 1
        else:
            i += 1

    if inp is None:
        sys.exit("fake_ffmpeg: no input")

    if mode == "audio_out":
        write_wav(out_path, dur if dur is not None else 0.0)
        return

    header, frames = read_grv(inp)
    fps = header["fps_num"] / header["fps_den"]
    first = 0
    count = len(frames)
    if ss is not None:
        first = int(math.ceil(ss * fps - 1e-6))
    if dur is not None:
        count = int(round(dur * fps))
    frames = frames[first:first + count]

    if mode == "video_out":
        header = dict(header)
        header["frame_count"] = len(frames)
        with open(out_path, "wb") as fh:
            fh.write(b"GRV1\n")
            fh.write((json.dumps(header) + "\n").encode())
            for f in frames:
                fh.write(f)
        return

    w, h = header["width"], header["height"]
    ow, oh = (w, h) if scale_w is None else scaled_dims(w, h, scale_w)
    out = sys.stdout.buffer
    for f in frames:
        out.write(resize_bilinear(f, w, h, ow, oh))
    out.flush()


if __name__ == "__main__":
    main(sys.argv)
