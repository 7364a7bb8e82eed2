"""Try to replay the published 38-step collision.

The chaining value was printed with a seven-digit last word.  This script
tries the leading-zero reading and every other eight-digit reading and
reports which (if any) makes both messages compress to the published
output.
"""

from __future__ import annotations

from shasat import hash_core as hc

H0 = "afea2566 1e0a73e2 da747de7 34381a7f 6f4c0d98 897dd98c 592ba6ad 2aa5e80"
M = ("5b5058d2 901f87fb 254bcfa2 5f8d7dc1 fb1053be 0622e1f8 da8801c2 a951cfbb "
     "5db42ffd 683b4391 f87eabbd e928b976 3675cc55 6ebe78be e3031536 c2de906f")
M2 = ("5b5058d2 901f87fb 254bcfa2 5f8d7dc1 fb1053be 0622e1f8 da8801c2 9737d17b "
      "5db43001 683b4391 f8812bbd e928b976 3675cc55 6ebe78be e3031536 c2de906b")
H1 = "d0e019f7 408269d3 24296a7b 30df8e7f 95d2bff8 34e2bca6 6c50a294 ddb4254a"


def readings(short: str):
    yield int(short, 16)
    for pos in range(len(short) + 1):
        for d in "0123456789abcdef":
            yield int(short[:pos] + d + short[pos:], 16)


def main() -> None:
    m, m2, h1 = hc.parse_words(M, 16), hc.parse_words(M2, 16), hc.parse_words(H1, 8)
    w, w2 = hc.expand_message(m, 38), hc.expand_message(m2, 38)
    print("expanded words with a difference:", [i for i in range(38) if w[i] != w2[i]])
    words = H0.split()
    hits = 0
    for last in dict.fromkeys(readings(words[-1])):
        regs = [int(x, 16) for x in words[:-1]] + [last]
        cv = hc.cv_from_registers(regs)
        out1, out2 = hc.compress(cv, m, 38), hc.compress(cv, m2, 38)
        if out1 == out2:
            hits += 1
            match = hc.cv_to_registers(out1) == h1
            print(f"h0 last word {last:08x}: collision, output {'matches' if match else 'differs from'} h1")
    if not hits:
        regs = [int(x, 16) for x in words[:-1]] + [int(words[-1], 16)]
        cv = hc.cv_from_registers(regs)
        out1, out2 = hc.compress(cv, m, 38), hc.compress(cv, m2, 38)
        diff = [f"{a ^ b:08x}" for a, b in zip(hc.cv_to_registers(out1), hc.cv_to_registers(out2))]
        print("no reading of the short word yields a collision")
        print("output xor with the leading-zero reading:", " ".join(diff))


if __name__ == "__main__":
    main()
