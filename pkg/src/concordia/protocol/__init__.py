from .bb84 import ChannelRun, eve_intercept_resend, noisy_bb84_round, random_round
from .cehlb import (Message, PublicTranscript, RunRecord, SecretKey, alice_encode, bob_decode_coherent,
                    bob_decode_measure, computational_distribution, demo_table, eve_quantum_attack, keygen)
