def peak(values):
    ordered = sorted(v.quantity for v in values)
    return ordered[-1]
