#!/usr/bin/env python3
"""Regenerate the bundled model profiles under src/ndsplit/data/profiles.

Layer shapes follow the public architectures (fp32 activations); FLOP counts are
rounded. Compute costs are ns/sample on a 2 TFLOP/s-effective GPU and a
100 GFLOP/s CPU. Everything except the AlexNet pins listed in CALIBRATION.md is
uncalibrated.
"""

import json
import sys
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "ndsplit" / "data" / "profiles"
INPUT = 150_528  # Imagenet-like raw sample

GPU_NS_PER_MFLOP = 500
CPU_NS_PER_MFLOP = 10_000
FC_CPU_NS_PER_MFLOP = 2_000
LAUNCH_NS = 100


def conv(out_elems, mflops, params, ws=1.0):
    return ("conv", out_elems * 4, mflops, params * 4, ws)


def elt(out_elems):
    return ("elt", out_elems * 4, 0.0, 0, 0.0)


def fc(out_elems, mflops, params):
    return ("fc", out_elems * 4, mflops, params * 4, 0.0)


def raw(kind, out_bytes, mflops, weight_bytes, mem_bytes):
    return ("raw", out_bytes, mflops, weight_bytes, mem_bytes, kind)


def layer_dict(i, spec):
    if spec[0] == "raw":
        _, out, mflops, wbytes, mem, kind = spec
    else:
        kind, out, mflops, wbytes, ws = spec
        mem = int(out * ws)
    if kind == "elt":
        gpu = LAUNCH_NS + out // 500
        cpu = out // 40
    elif kind == "fc":
        gpu = LAUNCH_NS + int(mflops * GPU_NS_PER_MFLOP)
        cpu = int(mflops * FC_CPU_NS_PER_MFLOP)
    else:
        gpu = LAUNCH_NS + int(mflops * GPU_NS_PER_MFLOP)
        cpu = int(mflops * CPU_NS_PER_MFLOP)
    return {
        "index": i,
        "output_bytes_per_sample": int(out),
        "fwd_cost_gpu": int(gpu),
        "fwd_cost_cpu": int(cpu),
        "mem_bytes_per_sample": int(mem),
        "weight_bytes": int(wbytes),
    }


def profile(name, freeze, layers, correction_frac):
    docs = [layer_dict(i, s) for i, s in enumerate(layers, start=1)]
    trainable = docs[freeze:]
    backward = 2 * sum(l["output_bytes_per_sample"] + l["mem_bytes_per_sample"] for l in trainable)
    prev = INPUT
    peak = 0
    for l in docs:
        peak = max(peak, prev + l["output_bytes_per_sample"] + l["mem_bytes_per_sample"])
        prev = l["output_bytes_per_sample"]
    doc = {
        "name": name,
        "input_bytes_per_sample": INPUT,
        "freeze_index": freeze,
        "backward_mem_bytes_per_sample": backward,
        "layers": docs,
    }
    corr = int(peak * correction_frac)
    if corr:
        doc["correction_per_sample_bytes"] = corr
    return doc


def alexnet():
    # Layers 13 and 16 are pinned; 5 is constrained to [41_667, 46_875).
    spec = [
        raw("conv", 774_400, 105.0, 93_184, 3_400_000),   # 1 conv1
        ("elt", 774_400, 0, 0, 0.0),                       # 2 relu
        ("elt", 186_624, 0, 0, 0.0),                       # 3 pool1
        raw("conv", 559_872, 224.0, 1_229_568, 559_872),  # 4 conv2
        raw("elt", 43_264, 0.5, 0, 0),                     # 5 relu+pool2
        ("elt", 129_792, 0, 0, 0.0),                       # 6
        raw("conv", 259_584, 150.0, 2_655_744, 259_584),  # 7 conv3
        ("elt", 259_584, 0, 0, 0.0),                       # 8
        raw("conv", 173_056, 112.0, 3_539_968, 173_056),  # 9 conv4
        ("elt", 173_056, 0, 0, 0.0),                       # 10
        raw("conv", 173_056, 75.0, 2_360_320, 173_056),   # 11 conv5
        ("elt", 173_056, 0, 0, 0.0),                       # 12
        ("elt", 35_200, 0, 0, 0.0),                        # 13 pool3 (pinned)
        ("elt", 36_864, 0, 0, 0.0),                        # 14 avgpool
        ("elt", 36_864, 0, 0, 0.0),                        # 15 flatten
        ("elt", 15_650, 0, 0, 0.0),                        # 16 (pinned)
        ("fc", 16_384, 38.0, 151_011_328, 0.0),            # 17 fc6
        ("elt", 16_384, 0, 0, 0.0),
        ("elt", 16_384, 0, 0, 0.0),
        ("fc", 16_384, 17.0, 67_125_248, 0.0),             # 20 fc7
        ("elt", 16_384, 0, 0, 0.0),
        ("fc", 4_000, 4.0, 16_388_000, 0.0),               # 22 fc8
    ]
    return profile("alexnet", 17, spec, 0.053)


def resnet18():
    spec = [
        conv(64 * 112 * 112, 118, 9_408), elt(64 * 112 * 112), elt(64 * 56 * 56),
        conv(64 * 56 * 56, 231, 73_984), conv(64 * 56 * 56, 231, 73_984),
        conv(128 * 28 * 28, 205, 230_144), conv(128 * 28 * 28, 205, 295_424),
        conv(256 * 14 * 14, 205, 919_040), conv(256 * 14 * 14, 205, 1_180_672),
        conv(512 * 7 * 7, 205, 3_673_088), conv(512 * 7 * 7, 205, 4_720_640),
        elt(512), elt(512), fc(1000, 0.5, 513_000),
    ]
    return profile("resnet18", 11, spec, 0.000005)


def resnet50():
    spec = [conv(64 * 112 * 112, 118, 9_408), elt(64 * 112 * 112), elt(64 * 56 * 56)]
    spec += [conv(256 * 56 * 56, 230, 70_000, 2.0) for _ in range(3)]
    spec += [conv(512 * 28 * 28, 260, 280_000, 2.0) for _ in range(4)]
    spec += [conv(1024 * 14 * 14, 240, 1_120_000, 2.0) for _ in range(6)]
    spec += [conv(2048 * 7 * 7, 270, 4_980_000, 2.0) for _ in range(3)]
    spec += [elt(2048), elt(2048), fc(1000, 2.0, 2_049_000)]
    return profile("resnet50", 21, spec, 0.064)


def _vgg_features(cfg):
    spec = []
    h, c = 224, 3
    for v in cfg:
        if v == "M":
            h //= 2
            spec.append(elt(c * h * h))
        else:
            mflops = 2 * 9 * c * v * h * h / 1e6
            spec.append(conv(v * h * h, mflops, 9 * c * v + v))
            spec.append(elt(v * h * h))
            c = v
    return spec


def _vgg_classifier(with_final_dropout):
    spec = [fc(4096, 205.0, 102_764_544), elt(4096), elt(4096),
            fc(4096, 33.6, 16_781_312), elt(4096)]
    if with_final_dropout:
        spec.append(elt(4096))
    spec.append(fc(1000, 8.2, 4_097_000))
    return spec


def vgg11():
    spec = _vgg_features([64, "M", 128, "M", 256, 256, "M", 512, 512, "M", 512, 512, "M"])
    spec += [elt(512 * 7 * 7)] + _vgg_classifier(False)
    return profile("vgg11", 25, spec, 0.117)


def vgg19():
    cfg = [64, 64, "M", 128, 128, "M", 256, 256, 256, 256, "M",
           512, 512, 512, 512, "M", 512, 512, 512, 512, "M"]
    spec = _vgg_features(cfg)
    spec += [elt(512 * 7 * 7)] + _vgg_classifier(True)
    return profile("vgg19", 36, spec, 0.0000025)


def densenet121():
    spec = [conv(64 * 112 * 112, 118, 9_408), elt(64 * 112 * 112), elt(64 * 112 * 112),
            elt(64 * 56 * 56)]
    spec += [conv(160 * 56 * 56, 180, 150_000), conv(256 * 56 * 56, 220, 190_000)]
    spec += [conv(128 * 28 * 28, 105, 33_000)]
    spec += [conv(w * 28 * 28, 120, 300_000) for w in (256, 384, 512)]
    spec += [conv(256 * 14 * 14, 52, 131_000)]
    spec += [conv(w * 14 * 14, 95, 700_000) for w in (448, 640, 832, 1024)]
    spec += [conv(512 * 7 * 7, 26, 524_000)]
    spec += [conv(w * 7 * 7, 60, 900_000) for w in (704, 896, 1024)]
    spec += [elt(1024 * 7 * 7), elt(1024), fc(1000, 2.0, 1_025_000)]
    return profile("densenet121", 20, spec, 0.0111)


def transformer():
    tokens, d = 197, 768
    spec = [conv(d * 196, 231, 590_592), elt(d * 196), elt(tokens * d)]
    spec += [conv(tokens * d, 1_450, 7_087_872, 4.0) for _ in range(12)]
    spec += [elt(tokens * d), elt(d), fc(d, 1.2, 590_592), fc(1000, 1.5, 769_000)]
    return profile("transformer", 17, spec, 0.0)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    builders = [alexnet, resnet18, resnet50, vgg11, vgg19, densenet121, transformer]
    expected = {"alexnet": 22, "resnet18": 14, "resnet50": 22, "vgg11": 28,
                "vgg19": 45, "densenet121": 22, "transformer": 19}
    for build in builders:
        doc = build()
        n = len(doc["layers"])
        if n != expected[doc["name"]]:
            sys.exit(f"{doc['name']}: built {n} layers, expected {expected[doc['name']]}")
        path = OUT / f"{doc['name']}.json"
        path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {path} ({n} layers, freeze {doc['freeze_index']})")


if __name__ == "__main__":
    main()
