def sum_cost(cities):
    return sum(city.cost for city in cities)
