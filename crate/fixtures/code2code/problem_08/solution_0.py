def total_cost(cities):
    total = 0
    for city in cities:
        total += city.cost
    return total
