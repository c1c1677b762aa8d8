def peak(values):
    ordered = sorted(v.price for v in values)
    return ordered[-1]
