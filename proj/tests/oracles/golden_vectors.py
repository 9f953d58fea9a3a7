#!/usr/bin/env python3
"""Independent reference computations for the golden vectors frozen in the
C++ tests. Uses only hashlib's SHAKE256 and Python integers, so it shares no
code with the library under test.

Run: python3 tests/oracles/golden_vectors.py
"""
import hashlib

RISTRETTO_ORDER = 2**252 + 27742317777372353535851937790883648493
TOY_P, TOY_Q, TOY_G = 23, 11, 2


def xof(tag: bytes, data: bytes, n: int) -> bytes:
    return hashlib.shake_256(bytes([len(tag)]) + tag + data).digest(n)


def hash_to_scalar(order: int, tag: bytes, data: bytes) -> int:
    return int.from_bytes(xof(tag, data, 64), "big") % order


def main() -> None:
    print("xof(x2, 'm', 64)   =", xof(b"x2", b"m", 64).hex())
    print("xof(id, 'm', 64)   =", xof(b"id", b"m", 64).hex())
    print("xof(id, 'm', 32)   =", xof(b"id", b"m", 32).hex())

    s = hash_to_scalar(RISTRETTO_ORDER, b"frost-rho", b"abc")
    print("h2s ristretto(frost-rho, abc) =", s.to_bytes(32, "big").hex())
    print("h2s toy(frost-rho, abc)       =", hash_to_scalar(TOY_Q, b"frost-rho", b"abc"))
    print("h2s toy(schnorr-challenge, '')=", hash_to_scalar(TOY_Q, b"schnorr-challenge", b""))

    # Toy ElGamal: sk = 4, r = 3 -> c1 = g^3, shared = g^12 = g^1.
    c1 = pow(TOY_G, 3, TOY_P)
    shared = pow(pow(TOY_G, 4, TOY_P), 3, TOY_P)
    ident = bytes([5]) + b"alice" + bytes(26)  # short identity "alice"
    mask = xof(b"id-mask", bytes([shared]), 32)
    c2 = bytes(a ^ b for a, b in zip(ident, mask))
    print("toy c1 =", c1, "shared =", shared)
    print("toy id(alice) =", ident.hex())
    print("toy c2 =", c2.hex())

    # Token transcript over that ciphertext, pk_eph = g^5, issued_at.
    pk_eph = pow(TOY_G, 5, TOY_P)
    issued_at = 1_700_000_000
    transcript = b"token" + bytes([c1]) + c2 + bytes([pk_eph]) + issued_at.to_bytes(8, "big")
    print("toy pk_eph =", pk_eph)
    print("toy transcript =", transcript.hex(), "len", len(transcript))

    # Account-digest identity.
    print("toy challenge(R=1, pk=2, '')  =", hash_to_scalar(TOY_Q, b"schnorr-challenge", bytes([1, 2])))
    print("toy challenge(R=9, pk=4, abc) =", hash_to_scalar(TOY_Q, b"schnorr-challenge", bytes([9, 4]) + b"abc"))
    print("identity('alice@example.org') =", xof(b"identity", b"alice@example.org", 32).hex())


if __name__ == "__main__":
    main()
