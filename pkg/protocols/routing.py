"""
Tables de routage communes aux protocoles à une ronde.
"""

from sharing.parties import Server

S1, S2, SA, SB = Server.S1, Server.S2, Server.SA, Server.SB

# Multiplication : destinataires de (t, t'). Chacun reçoit de ceux à qui il
# envoie.
PRODUCT_ROUTES: dict[Server, tuple[Server, Server]] = {
    S1: (SB, SA),
    S2: (SA, SB),
    SA: (S2, S1),
    SB: (S1, S2),
}

# Partenaire de la graine qui masque t et t'.
MASK_PEER: dict[Server, Server] = {S1: S2, S2: S1, SA: SB, SB: SA}

# S1 et Sa retranchent le masque, S2 et Sb l'ajoutent.
MASK_SUBTRACTS: dict[Server, bool] = {S1: True, S2: False, SA: True, SB: False}
