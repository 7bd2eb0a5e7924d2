#!/usr/bin/env python3
"""Regenerate the bundled per-layer tables from the torchvision architecture
definitions (224x224 input, fp32 parameters).

Rows are written in backward order: layer 0 is the layer closest to the
output. `bytes` is the fp32 parameter footprint rescaled so the model totals
are 97e6 / 170e6 / 527e6 bytes (largest-remainder rounding); VGG16's first
classifier layer is pinned to 400e6 bytes and the rest is rescaled to fill the
remaining 127e6. `macs` is the forward multiply-accumulate count and drives
the synthetic ready-time spacing.
"""
import os


def resnet(blocks):
    layers = [("conv1", 7 * 7 * 3 * 64 + 2 * 64, 7 * 7 * 3 * 64 * 112 * 112)]
    inp, res = 64, 56
    for stage, (n, planes) in enumerate(zip(blocks, [64, 128, 256, 512])):
        for b in range(n):
            stride = 2 if (stage > 0 and b == 0) else 1
            out = res // stride
            nm = f"layer{stage + 1}.{b}"
            layers.append((nm + ".conv1", inp * planes + 2 * planes, inp * planes * res * res))
            layers.append((nm + ".conv2", 9 * planes * planes + 2 * planes, 9 * planes * planes * out * out))
            layers.append((nm + ".conv3", 4 * planes * planes + 8 * planes, 4 * planes * planes * out * out))
            if b == 0:
                layers.append((nm + ".downsample", 4 * inp * planes + 8 * planes, 4 * inp * planes * out * out))
            inp, res = planes * 4, out
    layers.append(("fc", 2048 * 1000 + 1000, 2048 * 1000))
    return layers


def vgg16():
    cfg = [64, 64, "M", 128, 128, "M", 256, 256, 256, "M", 512, 512, 512, "M", 512, 512, 512, "M"]
    layers, c, res, i = [], 3, 224, 0
    for v in cfg:
        if v == "M":
            res //= 2
            i += 1
            continue
        layers.append((f"features.{i}", 9 * c * v + v, 9 * c * v * res * res))
        c = v
        i += 2
    layers.append(("classifier.0", 25088 * 4096 + 4096, 25088 * 4096))
    layers.append(("classifier.3", 4096 * 4096 + 4096, 4096 * 4096))
    layers.append(("classifier.6", 4096 * 1000 + 1000, 4096 * 1000))
    return layers


def rescale(layers, total, pinned):
    rest = total - sum(pinned.values())
    free = [(n, p) for n, p, _ in layers if n not in pinned]
    denom = sum(p for _, p in free)
    raw = {n: p * rest / denom for n, p in free}
    out = {n: int(v) for n, v in raw.items()}
    short = rest - sum(out.values())
    for n in sorted(raw, key=lambda n: (-(raw[n] - out[n]), n))[:short]:
        out[n] += 1
    out.update(pinned)
    return out


MODELS = {
    "resnet50": (resnet([3, 4, 6, 3]), 97_000_000, {}),
    "resnet101": (resnet([3, 4, 23, 3]), 170_000_000, {}),
    "vgg16": (vgg16(), 527_000_000, {"classifier.0": 400_000_000}),
}

if __name__ == "__main__":
    here = os.path.dirname(os.path.abspath(__file__))
    for name, (layers, total, pinned) in MODELS.items():
        sizes = rescale(layers, total, pinned)
        path = os.path.join(here, f"{name}.layers.csv")
        with open(path, "w") as f:
            f.write(f"# {name}: per-layer table, backward order (layer 0 = closest to output)\n")
            f.write(f"# params: fp32 parameter count; bytes: rescaled so the total is {total}; macs: forward MACs at 224x224\n")
            f.write("layer,name,params,bytes,macs\n")
            for idx, (n, p, m) in enumerate(reversed(layers)):
                f.write(f"{idx},{n},{p},{sizes[n]},{m}\n")
        print(path, len(layers), sum(p for _, p, _ in layers), sum(sizes.values()))
