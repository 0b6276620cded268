from impacket.ImpactDecoder import *
