#!/usr/bin/env python3
"""Regenerates the toy corpora under data/.

Output is a pure function of SEED, so running this script again reproduces
the checked-in files byte for byte.

    python3 tools/make_toy_data.py [--out data]
"""

import argparse
import pathlib
import random

SEED = 20240611

SUBJECTS = [
    ("我", "i"), ("你", "you"), ("他", "he"), ("我们", "we"), ("你们", "you all"),
    ("他们", "they"), ("妈妈", "mother"), ("姐姐", "sister"), ("老师", "the teacher"),
    ("学生", "the student"),
]

# (source, target, verbs that accept it)
OBJECTS = [
    ("鱼", "fish", "eat see love"), ("苹果", "apples", "eat see love"),
    ("茶", "tea", "drink love"), ("水", "water", "drink"), ("药", "medicine", "drink eat"),
    ("花", "flowers", "see love"), ("草", "grass", "see"), ("树", "trees", "see"),
    ("森林", "the forest", "see love"), ("桥", "the bridge", "see"),
    ("山", "mountains", "see love"), ("河", "the river", "see"), ("海", "the sea", "see love"),
    ("湖", "the lake", "see"), ("鸟", "birds", "see love"), ("猫", "cats", "see love"),
    ("狗", "dogs", "see love"), ("马", "horses", "see"), ("牛", "cows", "see"),
    ("灯", "the lamp", "see"), ("天", "the sky", "see"), ("云", "clouds", "see love"),
]

VERBS = {"eat": ("吃", "eat"), "drink": ("喝", "drink"), "see": ("看", "see"),
         "love": ("爱", "love")}

ADJECTIVES = [("大", "big"), ("小", "small"), ("红", "red"), ("绿", "green"),
              ("好", "good"), ("热", "hot")]

NOUNS = [("猫", "the cat"), ("狗", "the dog"), ("鱼", "the fish"), ("花", "the flower"),
         ("茶", "the tea"), ("灯", "the lamp"), ("马", "the horse"), ("树", "the tree"),
         ("石", "the stone"), ("火", "the fire"), ("日", "the sun"), ("月", "the moon")]

PLACES = [("家", "home"), ("山", "the mountain"), ("河", "the river"), ("湖", "the lake"),
          ("桥", "the bridge"), ("学", "school")]


SINGULAR = {"he", "mother", "sister", "the teacher", "the student"}


def copula(subject):
    if subject == "i":
        return "am"
    return "is" if subject in SINGULAR else "are"


def conjugate(subject, verb):
    return verb + "s" if subject in SINGULAR else verb


def sentence(rng):
    kind = rng.randrange(4)
    if kind == 0:
        s, o = rng.choice(SUBJECTS), rng.choice(OBJECTS)
        verb = VERBS[rng.choice(o[2].split())]
        return [s[0], verb[0], o[0]], f"{s[1]} {conjugate(s[1], verb[1])} {o[1]}".split()
    if kind == 1:
        n, a = rng.choice(NOUNS), rng.choice(ADJECTIVES)
        return [n[0], "很", a[0]], f"{n[1]} is very {a[1]}".split()
    if kind == 2:
        s, p = rng.choice(SUBJECTS), rng.choice(PLACES)
        return [s[0], "在", p[0]], f"{s[1]} {copula(s[1])} at {p[1]}".split()
    s, a, o = rng.choice(SUBJECTS), rng.choice(ADJECTIVES), rng.choice(OBJECTS)
    verb = VERBS[rng.choice(o[2].split())]
    words = o[1].split()
    if words[0] == "the":
        words.insert(1, a[1])
    else:
        words.insert(0, a[1])
    target = f"{s[1]} {conjugate(s[1], verb[1])} {' '.join(words)}"
    return [s[0], verb[0], a[0] + "的", o[0]], target.split()


def unique_pairs(rng, count, max_tokens):
    seen, out = set(), []
    while len(out) < count:
        src, tgt = sentence(rng)
        key = " ".join(src)
        if key in seen or len(src) > max_tokens or len(tgt) > max_tokens:
            continue
        seen.add(key)
        out.append((src, tgt))
    return out


def write_lines(path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(" ".join(r) + "\n" for r in rows), encoding="utf-8")


OVERFIT_CFG = """\
# Overfit run: W+C+R on the 100-pair toy corpus, dev = train.
train.source = train.zh
train.target = train.en
table = ../decomposition.tsv
output_dir = runs/overfit
setting = W+C+R
embedding = 32
hidden = 64
batch_size = 16
dropout = 0
max_updates = 2000
validate_every = 100
beam = 10
seed = 1
"""

MATRIX_CFG = """\
# Five-setting smoke matrix on the toy corpus.
train.source = train.zh
train.target = train.en
table = ../decomposition.tsv
output_dir = runs/matrix
embedding = 32
hidden = 64
batch_size = 16
dropout = 0.2
max_updates = 1500
validate_every = 100
beam = 4
seed = 7
"""


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parents[1] / "data"))
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    rng = random.Random(SEED)

    toy = unique_pairs(rng, 100, 8)
    write_lines(out / "toy" / "train.zh", [s for s, _ in toy])
    write_lines(out / "toy" / "train.en", [t for _, t in toy])
    (out / "toy" / "overfit.cfg").write_text(OVERFIT_CFG, encoding="utf-8")
    (out / "toy" / "matrix.cfg").write_text(MATRIX_CFG, encoding="utf-8")

    # Fixture corpus: 100 lines, 7 of which exceed 50 tokens on one side.
    fixture = unique_pairs(rng, 100, 8)
    long_lines = sorted(rng.sample(range(100), 7))
    src_rows, tgt_rows = [], []
    for i, (src, tgt) in enumerate(fixture):
        if i in long_lines:
            reps = 51 // len(src) + 1 + rng.randrange(3)
            if long_lines.index(i) % 2 == 0:
                src = (src * reps)[: 51 + rng.randrange(10)]
            else:
                tgt = (tgt * reps * 2)[: 51 + rng.randrange(10)]
        src_rows.append(src)
        tgt_rows.append(tgt)
    write_lines(out / "fixture" / "corpus.zh", src_rows)
    write_lines(out / "fixture" / "corpus.en", tgt_rows)


if __name__ == "__main__":
    main()
